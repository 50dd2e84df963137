"""Acceptance gate: nine end-to-end checks with pinned tolerances.

Each test prints exactly one machine-readable verdict line of the form
``ACCEPTANCE <n> [<label>]: PASS`` (or ``FAIL``) in addition to the usual
pytest outcome.  Tolerances and frozen baseline values are stated inline
next to each assertion.
"""

import functools
import math
import random
import time
from fractions import Fraction

import pytest

from tropcert.certify import certify_system, certify_te, is_permanent_verdict
from tropcert.escape import escape_cone
from tropcert.geometry import (
    Cell,
    Cone2,
    ConeKind,
    RatVec2,
    fan_from_rays,
    normal_fan,
    vec,
)
from tropcert.inclusions import (
    build_dominance_di,
    build_toric_di,
    strict_embedding_check,
)
from tropcert.regions import (
    LambdaEvaluator,
    ScaffoldCurve,
    _segments_cross,
    construct_region,
    slide_gamma,
)
from tropcert.simulate import (
    KappaSchedule,
    integrate,
    lv_conserved,
    permanence_report,
    region_margin,
)
from tropcert.systems import five_source_network, lotka_volterra_variant


def criterion(n, label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE {n} [{label}]: FAIL")
                raise
            print(f"\nACCEPTANCE {n} [{label}]: PASS")
        return wrapper
    return deco


@pytest.fixture(scope="module")
def mlv_half():
    return lotka_volterra_variant(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))


@pytest.fixture(scope="module")
def mlv_di(mlv_half):
    return build_dominance_di(mlv_half, "comparison")


@criterion(1, "escape-cone table")
def test_criterion_1_escape_cone_table():
    t0 = time.perf_counter()
    fan = fan_from_rays(
        [vec(1, 1), vec(0, 1), vec(-1, 1), vec(-1, -1), vec(0, -1), vec(1, -1)],
        Fraction(1, 400),
    )
    assert fan.n == 6  # 13 cones: 6 rays + 6 sectors + origin
    Q1 = Cone2.wedge(vec(1, 0), vec(0, 1))
    Q3 = Cone2.wedge(vec(-1, 0), vec(0, -1))
    i = {d: fan.rays.index(d) for d in fan.rays}
    # frozen expected classification, one entry per non-origin cell:
    # (limit-cone kind, thickened axis rays)
    expected = {
        Cell.ray(i[vec(1, 1)]): (ConeKind.WEDGE, set()),        # -> Q1
        Cell.ray(i[vec(-1, -1)]): (ConeKind.WEDGE, set()),      # -> Q3
        Cell.ray(i[vec(0, -1)]): (ConeKind.HALFPLANE, set()),
        Cell.ray(i[vec(0, 1)]): (ConeKind.RAY, {vec(0, 1)}),
        Cell.ray(i[vec(-1, 1)]): (ConeKind.RAY, {vec(0, 1)}),
        Cell.ray(i[vec(1, -1)]): (ConeKind.RAY, {vec(1, 0)}),
        Cell.sector(i[vec(1, 1)]): (ConeKind.RAY, {vec(0, 1)}),
        Cell.sector(i[vec(0, 1)]): (ConeKind.RAY, {vec(0, 1)}),
        Cell.sector(i[vec(-1, 1)]): (ConeKind.HALFPLANE,
                                     {vec(0, 1), vec(0, -1)}),
        Cell.sector(i[vec(-1, -1)]): (ConeKind.HALFPLANE, {vec(-1, 0)}),
        Cell.sector(i[vec(0, -1)]): (ConeKind.HALFPLANE, {vec(1, 0)}),
        Cell.sector(i[vec(1, -1)]): (ConeKind.RAY, {vec(1, 0)}),
    }
    for cell, (kind, thick) in expected.items():
        B = escape_cone(fan, cell)
        assert B.limit.kind is kind, (cell, B.limit)
        assert set(B.thickened) == thick, (cell, B.thickened)
    assert escape_cone(fan, Cell.ray(i[vec(1, 1)])).limit == Q1
    assert escape_cone(fan, Cell.ray(i[vec(-1, -1)])).limit == Q3
    assert time.perf_counter() - t0 < 1.0


@criterion(2, "toric inclusions certify on random fans")
def test_criterion_2_random_toric_fans():
    t0 = time.perf_counter()
    rng = random.Random(20260824)
    done = 0
    while done < 100:
        n = rng.randint(3, 12)
        dirs, seen = [], set()
        while len(dirs) < n:
            x, y = rng.randint(-9, 9), rng.randint(-9, 9)
            if x == 0 and y == 0:
                continue
            p = RatVec2(Fraction(x), Fraction(y)).primitive()
            if (p.x1, p.x2) in seen:
                continue
            seen.add((p.x1, p.x2))
            dirs.append(p)
        fan = fan_from_rays(dirs, Fraction(1, 400))
        cert = certify_te(build_toric_di(fan))
        assert cert.positive, dirs
        done += 1
    assert time.perf_counter() - t0 < 10.0


@criterion(3, "predator-prey variant verdicts")
def test_criterion_3_mlv_verdicts():
    cases = [
        ((Fraction(1, 4), Fraction(1, 4)), True),
        ((Fraction(1, 2), Fraction(1, 2)), True),
        ((Fraction(3, 4), Fraction(1, 2)), True),
        ((Fraction(1), Fraction(1, 2)), True),
        ((Fraction(2), Fraction(1, 2)), True),
        ((Fraction(0), Fraction(0)), False),
        ((Fraction(1, 2), Fraction(1)), False),
        ((Fraction(1, 2), Fraction(2)), False),
    ]
    for (e1, e2), expect in cases:
        t0 = time.perf_counter()
        sysm = lotka_volterra_variant(e1, e2, Fraction(1, 2))
        cert, rep, _ = certify_system(sysm)
        assert is_permanent_verdict(cert, rep) == expect, (e1, e2)
        assert time.perf_counter() - t0 < 1.0, (e1, e2)


@criterion(4, "five-source network: normal fan and verdict")
def test_criterion_4_five_source_network():
    sysm = five_source_network()
    fan = normal_fan(sysm.sources, Fraction(1, 400))
    assert set(fan.rays) == {vec(-1, -1), vec(-1, 1), vec(0, 1), vec(2, -1)}
    cert, rep, _ = certify_system(sysm, strategy="dominance-normal")
    assert is_permanent_verdict(cert, rep)


@criterion(5, "invariant-region pipeline under random schedules")
def test_criterion_5_region_pipeline(mlv_half, mlv_di):
    t0 = time.perf_counter()
    poly, report = construct_region(mlv_di, 30.0)
    assert report.passed
    assert all(chk.min_inner >= 0 for chk in report.checks)  # exact rationals
    rng = random.Random("acceptance-5")
    trajectories = []
    for sched_seed in range(5):
        sched = KappaSchedule.piecewise(mlv_half, period=1.0, seed=sched_seed)
        for _ in range(20):
            x0 = (10.0 ** rng.uniform(-1, 1), 10.0 ** rng.uniform(-1, 1))
            trajectories.append(
                integrate(mlv_half, sched, x0, 40.0, 0.01, region=poly)
            )
    rep = permanence_report(trajectories, poly)
    assert rep.n_entered == 100
    assert rep.n_exits_after_entry == 0
    assert rep.worst_margin_after_entry >= -1e-9  # log-space margin tolerance
    assert time.perf_counter() - t0 < 60.0


@criterion(6, "nested family and Lyapunov decrease")
def test_criterion_6_nested_family_and_lambda(mlv_half, mlv_di):
    polys = [construct_region(mlv_di, 30.0 * 2 ** k)[0] for k in range(5)]
    # strict nesting: every vertex of R_k lies strictly inside R_{k+1}
    for inner, outer in zip(polys, polys[1:]):
        assert min(
            region_margin(outer, v.as_floats()) for v in inner.vertices
        ) > 0
        # disjoint boundaries: no edge of R_k crosses an edge of R_{k+1}
        for a, b in inner.edge_segments():
            for c, d in outer.edge_segments():
                assert not _segments_cross(a, b, c, d)
    # finite-difference decrease of Lambda outside R_{t_hat + 1}
    sched = KappaSchedule.piecewise(mlv_half, period=1.0, seed=7)
    traj = integrate(mlv_half, sched, (math.exp(-18.0), math.exp(-18.0)),
                     8.0, 0.05)
    ev = LambdaEvaluator(mlv_di, polys[0], rel_tol=1e-4)
    lams, hint = [], None
    for x in traj.states:
        hint = ev.value(
            x, hint=None if hint is None or hint <= polys[0].t_hat else hint
        )
        lams.append(hint)
    outside = [(a, b) for a, b in zip(lams, lams[1:]) if a > polys[0].t_hat + 1.0]
    assert len(outside) >= 30  # the start is deep in the third quadrant
    decreasing = sum(1 for a, b in outside if b <= a + 1e-6)  # per-step tol
    assert decreasing >= 0.99 * len(outside), (decreasing, len(outside))


@criterion(7, "gamma sliding: identity and monotonicity")
def test_criterion_7_gamma_sliding():
    # symmetric curve pairs: gamma(tau) = tau to 1e-10
    symmetric = [
        (ScaffoldCurve(1, 1, 1, 2), ScaffoldCurve(1, 1, 2, 1), 3.0),
        (ScaffoldCurve(1, 1, -1, -2), ScaffoldCurve(1, 1, -2, -1), 2.0),
        (ScaffoldCurve(2, 3, 1, 3), ScaffoldCurve(3, 2, 3, 1), 0.8),
        (ScaffoldCurve(5, 1, 2, 5), ScaffoldCurve(1, 5, 5, 2), 1.6),
    ]
    for s1, s2, tau in symmetric:
        g = slide_gamma(s1, s2, vec(-1, 1), tau, tau)
        assert abs(g - tau) <= 1e-10 * max(1.0, tau), (s1, s2, tau, g)
    # 50 random instances: positive coefficients and exponents, direction in
    # the open second quadrant (transversal by sign), gamma strictly
    # increasing across a 100-point tau grid
    rng = random.Random(7)
    for case in range(50):
        s1 = ScaffoldCurve(
            Fraction(rng.randint(1, 20), rng.randint(1, 20)),
            Fraction(rng.randint(1, 20), rng.randint(1, 20)),
            Fraction(rng.randint(1, 6), rng.randint(1, 3)),
            Fraction(rng.randint(1, 6), rng.randint(1, 3)),
        )
        s2 = ScaffoldCurve(
            Fraction(rng.randint(1, 20), rng.randint(1, 20)),
            Fraction(rng.randint(1, 20), rng.randint(1, 20)),
            Fraction(rng.randint(1, 6), rng.randint(1, 3)),
            Fraction(rng.randint(1, 6), rng.randint(1, 3)),
        )
        v = vec(-rng.randint(1, 5), rng.randint(1, 5))
        taus = [0.5 * 2.0 ** (i / 99) for i in range(100)]
        prev, seed = None, 1.0
        for tau in taus:
            g = slide_gamma(s1, s2, v, tau, seed)
            if prev is not None:
                assert g > prev, (case, tau, g, prev)
            prev, seed = g, g


@criterion(8, "strict-embedding margin regression")
def test_criterion_8_embedding_margin(mlv_half):
    # target fattening exp(-6) ~ 0.00247875; the fan parameter must be a
    # rational, so the nearest simple stand-in 2479/1000000 is used
    varrho = Fraction(2479, 1000000)
    di = build_dominance_di(mlv_half, "comparison", varrho, Fraction(1, 32))
    cert = certify_te(di)
    assert cert.positive
    rep = strict_embedding_check(
        mlv_half, di, radii=(8.0, 16.0, 32.0), samples=12, seed=0
    )
    assert rep.passed
    assert rep.min_margin > 0
    # frozen regression baseline (radians), pinned from the first computation
    assert rep.min_margin == pytest.approx(0.02091239691006208, abs=1e-12)


@criterion(9, "integrator order via conserved-quantity drift")
def test_criterion_9_integrator_order():
    sysm = lotka_volterra_variant(0, 0, Fraction(1, 2))
    sched = KappaSchedule.constant(sysm, [1.0, 1.0, 1.0])
    drifts = []
    for h in (1e-2, 5e-3):
        traj = integrate(sysm, sched, (1.5, 0.5), 50.0, h)
        v0 = lv_conserved(traj.states[0])
        drifts.append(max(abs(lv_conserved(x) - v0) for x in traj.states))
    ratio = drifts[0] / drifts[1]
    # fourth order: halving the step shrinks the drift ~16x (within factor 2)
    assert 8.0 <= ratio <= 32.0, ratio
