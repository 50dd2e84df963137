"""Escape-direction cones versus the numeric curve-tangent oracle."""

import math
import random
from fractions import Fraction

import pytest

from tropcert.escape import (
    EscapeCurveSpec,
    escape_cone,
    limit_tangent_cone,
    sample_escape_tangent,
)
from tropcert.geometry import (
    Cone2,
    ConeKind,
    cone_contains,
    fan_from_rays,
    vec,
)


def test_limit_tangent_table_special_directions():
    q1, t1 = limit_tangent_cone(vec(1, 1))
    assert (q1, t1) == (Cone2.wedge(vec(1, 0), vec(0, 1)), False)
    q3, t3 = limit_tangent_cone(vec(-1, -1))
    assert (q3, t3) == (Cone2.wedge(vec(-1, 0), vec(0, -1)), False)
    hx, tx = limit_tangent_cone(vec(-1, 0))
    assert (hx.kind, tx) == (ConeKind.HALFPLANE, False)
    assert cone_contains(hx, vec(-1, 5)) and not cone_contains(hx, vec(1, 0))
    hy, ty = limit_tangent_cone(vec(0, -1))
    assert (hy.kind, ty) == (ConeKind.HALFPLANE, False)
    assert cone_contains(hy, vec(5, -1)) and not cone_contains(hy, vec(0, 1))


def test_limit_tangent_table_generic_directions():
    cases = [
        (vec(2, 1), vec(1, 0)),
        (vec(1, 2), vec(0, 1)),
        (vec(-1, 2), vec(0, 1)),
        (vec(-2, 1), vec(0, 1)),
        (vec(-2, -1), vec(0, -1)),
        (vec(-1, -2), vec(-1, 0)),
        (vec(1, -2), vec(1, 0)),
        (vec(2, -1), vec(1, 0)),
        (vec(1, 0), vec(1, 0)),
        (vec(0, 1), vec(0, 1)),
    ]
    for r, axis in cases:
        c, thick = limit_tangent_cone(r)
        assert thick and c == Cone2.ray(axis), r


def test_numeric_tangent_oracle_generic():
    rng = random.Random(21)
    for _ in range(60):
        r = vec(rng.randint(-5, 5), rng.randint(-5, 5))
        if r.is_zero() or r.x1 == r.x2:
            continue
        if (r.x2 == 0 and r.x1 < 0) or (r.x1 == 0 and r.x2 < 0):
            continue
        cone, thick = limit_tangent_cone(r)
        assert thick
        ax, ay = float(cone.a.x1), float(cone.a.x2)
        spec = EscapeCurveSpec(r, r.perp(), Fraction(1, 2), Fraction(1, 4))
        vx, vy = sample_escape_tangent(spec, 200.0)
        assert vx * ax + vy * ay > 1.0 - 1e-9, (r, (vx, vy))


def test_numeric_tangent_oracle_specials_stay_in_cone():
    for r in (vec(1, 1), vec(-1, -1), vec(-1, 0), vec(0, -1)):
        cone, _ = limit_tangent_cone(r)
        gens = [(float(g.x1), float(g.x2)) for g in cone.generators()]
        for alpha, beta in [(Fraction(1, 2), Fraction(1, 8)), (Fraction(2), Fraction(1))]:
            spec = EscapeCurveSpec(r, r.perp(), alpha, beta)
            for t in (5.0, 20.0, 120.0):
                vx, vy = sample_escape_tangent(spec, t)
                # within 1e-6 of the closed cone (max inner product near 1
                # means the tangent aligns with some admissible direction)
                best = max(
                    (vx * gx + vy * gy) / math.hypot(gx, gy) for gx, gy in gens
                )
                assert best > 0.5, (r, t, (vx, vy))


def test_escape_cone_thickened_rays_live_in_limit():
    fan = fan_from_rays(
        [vec(3, 1), vec(1, 3), vec(-2, 1), vec(-1, -3), vec(1, -2)],
        Fraction(1, 400),
    )
    for cell in fan.cells(include_origin=False):
        B = escape_cone(fan, cell)
        for d in B.thickened:
            assert cone_contains(B.limit, d)
        for p in B.pieces:
            for g in p.generators():
                assert cone_contains(B.limit, g)


def test_sector_boundary_diagonal_contributes_one_axis():
    # sector starting exactly at (1,1): the inward offset pins the tangent of
    # that boundary to the counterclockwise axis (0,1)
    fan = fan_from_rays([vec(1, 1), vec(-1, 2), vec(-1, -1), vec(1, -2)],
                        Fraction(1, 400))
    i = fan.rays.index(vec(1, 1))
    from tropcert.geometry import Cell

    B = escape_cone(fan, Cell.sector(i))
    assert vec(0, 1) in B.thickened
    assert not cone_contains(B.limit, vec(1, 0))


def test_escape_origin_rejected():
    fan = fan_from_rays([vec(1, 0), vec(0, 1), vec(-1, -1)], Fraction(1, 400))
    from tropcert.geometry import Cell

    with pytest.raises(ValueError):
        escape_cone(fan, Cell.origin())
