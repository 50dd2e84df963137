"""Exact cone and fan geometry, checked against independent oracles."""

import random
from fractions import Fraction

import pytest

from tropcert.geometry import (
    Cell,
    Cone2,
    ConeKind,
    RatVec2,
    comparison_fan,
    cone_contains,
    cone_from_generators,
    convex_hull,
    fan_from_rays,
    locate_cells_log,
    negative_dual,
    normal_fan,
    open_intersection_witness,
    refine,
    vec,
)


def _rand_vec(rng, span=9):
    while True:
        v = vec(rng.randint(-span, span), rng.randint(-span, span))
        if not v.is_zero():
            return v


def _in_pair_hull(gens, v):
    """Membership oracle: v is a nonnegative combination of some pair of
    generators (two-generator decompositions suffice in the plane)."""
    if v.is_zero():
        return True
    for a in gens:
        if a.cross(v) == 0 and a.dot(v) > 0:
            return True
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            det = a.cross(b)
            if det == 0:
                if a.dot(b) < 0 and a.cross(v) == 0:
                    return True  # v on the line spanned by antipodal gens
                continue
            lam = v.cross(b) / det
            mu = a.cross(v) / det
            if lam >= 0 and mu >= 0:
                return True
    return False


def test_cone_from_generators_matches_pair_hull_oracle():
    rng = random.Random(12)
    for _ in range(200):
        gens = [_rand_vec(rng) for _ in range(rng.randint(1, 4))]
        c = cone_from_generators(gens)
        for _ in range(25):
            v = _rand_vec(rng)
            assert cone_contains(c, v) == _in_pair_hull(gens, v), (gens, v, c)


def test_cone_kinds_and_canonical_forms():
    assert Cone2.ray(vec(2, 4)).a == vec(1, 2)
    assert Cone2.line(vec(0, -3)).a == vec(0, 1)  # upper-half representative
    with pytest.raises(ValueError):
        Cone2.wedge(vec(1, 0), vec(-1, 0))  # angle exactly pi
    w = cone_from_generators([vec(1, 0), vec(-1, 1)])
    assert w.kind is ConeKind.WEDGE
    h = cone_from_generators([vec(1, 0), vec(-1, 0), vec(0, 1)])
    assert h.kind is ConeKind.HALFPLANE
    f = cone_from_generators([vec(1, 1), vec(-1, 0), vec(0, -1)])
    assert f.kind is ConeKind.FULL


def test_negative_dual_oracle():
    rng = random.Random(3)
    for _ in range(100):
        gens = [_rand_vec(rng) for _ in range(rng.randint(1, 3))]
        K = cone_from_generators(gens)
        D = negative_dual(K)
        for _ in range(25):
            v = _rand_vec(rng)
            expect = all(v.dot(g) <= 0 for g in K.generators())
            assert cone_contains(D, v) == expect, (K, D, v)


def test_open_intersection_witness_is_sound():
    rng = random.Random(5)
    for _ in range(200):
        K = cone_from_generators([_rand_vec(rng) for _ in range(rng.randint(1, 3))])
        B = cone_from_generators([_rand_vec(rng) for _ in range(rng.randint(1, 3))])
        w = open_intersection_witness(K, B)
        if w is not None:
            assert cone_contains(K, w)
            assert cone_contains(B, w, strict=True)
        else:
            # no sampled direction may lie in K and in the interior of B
            for _ in range(40):
                v = _rand_vec(rng)
                assert not (
                    cone_contains(K, v) and cone_contains(B, v, strict=True)
                ), (K, B, v)


def test_fan_from_rays_orders_and_completes():
    fan = fan_from_rays([vec(1, 0), vec(-3, 1), vec(0, 1)], Fraction(1, 400))
    n = fan.n
    assert n >= 3
    for i in range(n):
        u, w = fan.rays[i], fan.rays[(i + 1) % n]
        assert u.cross(w) > 0 or (u.cross(w) == 0 and u.dot(w) < 0)
    # every requested direction survives as a ray
    for d in (vec(1, 0), vec(-3, 1), vec(0, 1)):
        assert d in fan.rays
    # a single direction is completed into a valid fan with inserted rays
    tiny = fan_from_rays([vec(1, 0)], Fraction(1, 400))
    assert tiny.n >= 2 and vec(1, 0) in tiny.rays
    with pytest.raises(ValueError):
        fan_from_rays([], Fraction(1, 400))


def test_normal_fan_rays_are_edge_normals():
    rng = random.Random(9)
    for _ in range(30):
        pts = [_rand_vec(rng, span=6) for _ in range(rng.randint(3, 8))]
        if len(convex_hull(pts)) < 3:
            continue
        fan = normal_fan(pts, Fraction(1, 400))
        genuine = [r for r in fan.rays if r not in fan.inserted]
        for r in genuine:
            best = max(p.dot(r) for p in pts)
            assert sum(1 for p in pts if p.dot(r) == best) >= 2, (pts, r)


def test_comparison_fan_contains_difference_normals():
    sources = [vec(1, 0), vec(1, 1), vec(0, 1)]
    fan = comparison_fan(sources, Fraction(1, 400))
    for i, s in enumerate(sources):
        for t in sources[i + 1:]:
            d = (s - t).primitive()
            assert any(r.dot(d) == 0 for r in fan.rays), d


def test_refine_keeps_all_rays():
    a = fan_from_rays([vec(1, 0), vec(0, 1), vec(-1, -1)], Fraction(1, 400))
    b = fan_from_rays([vec(1, 1), vec(-1, 0), vec(0, -1)], Fraction(1, 400))
    r = refine(a, b)
    for d in a.rays + b.rays:
        assert d in r.rays


def test_locate_cells_log_ray_and_sector():
    fan = fan_from_rays(
        [vec(1, 0), vec(0, 1), vec(-1, 0), vec(0, -1)], Fraction(1, 400)
    )
    L = fan.log_halfwidth()
    # far along the +x ray: the ray cell must be found
    cells = locate_cells_log(fan, (10 * L, 0.0))
    assert Cell.ray(0) in cells
    # deep inside the first quadrant sector, away from both strips
    cells = locate_cells_log(fan, (10 * L, 10 * L))
    assert cells == {Cell.sector(0)}
    # near the origin: the origin cell
    assert Cell.origin() in locate_cells_log(fan, (0.0, 0.0))
