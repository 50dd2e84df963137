"""Escape-direction cones for the cells of a complete fan.

A curve ``C(t) = exp(r*t + g(t)*p)`` with ``g(t) = 1 - alpha*exp(-beta*t)``
and ``p`` perpendicular to ``r`` stays inside the fattened cell containing
the direction ``r`` and leaves every compact subset of the open positive
quadrant.  The cone of its possible limiting tangent directions depends only
on the position of ``r`` relative to the four special directions
``(1,1), (0,-1), (-1,-1), (-1,0)``:

* ``r`` parallel to ``(1,1)``: the closed first quadrant, exactly;
* ``r`` parallel to ``(-1,-1)``: the closed third quadrant, exactly;
* ``r`` parallel to ``(-1,0)``: the half-plane ``{v1 <= 0}``, exactly;
* ``r`` parallel to ``(0,-1)``: the half-plane ``{v2 <= 0}``, exactly;
* otherwise a single coordinate axis ray, approached from both sides — such
  rays are *thickened*: every neighborhood cone of the axis is hit for every
  positive thickening parameter.

The escape set of a cell aggregates these contributions over the directions
available to curves that stay inside the cell's fattened region:

* a ray cell admits perpendicular offsets on both sides of its direction, so
  it receives the full table entry of its direction;
* a sector cell receives the full table entry of every direction in its open
  angular interior, but a *boundary* ray parallel to a diagonal contributes
  only the single axis ray selected by inward offsets — curves hugging the
  boundary must offset into the sector by more than the strip width, which
  pins the limiting tangent of a diagonal direction to one axis.

The aggregate is kept as the list of contribution cones (the escape set need
not be convex — it can span more than a half-plane), together with the set
of thickened axis rays and the convex hull for display.  The separation test
downstream consumes the pieces and the thickened rays.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import (
    Cell,
    CellTag,
    Cone2,
    Fan2,
    RatVec2,
    cone_contains,
    cone_hull,
    vec,
    _strictly_between,
)

_Q1 = Cone2.wedge(vec(1, 0), vec(0, 1))
_Q3 = Cone2.wedge(vec(-1, 0), vec(0, -1))
_HALF_X_NONPOS = Cone2.halfplane(vec(0, 1))    # {v : v1 <= 0}
_HALF_Y_NONPOS = Cone2.halfplane(vec(-1, 0))   # {v : v2 <= 0}

AXES = (vec(1, 0), vec(0, 1), vec(-1, 0), vec(0, -1))


@dataclass(frozen=True)
class EscapeCone:
    """Escape directions of a cell.

    ``pieces`` are the exact contribution cones whose union is the escape
    set; ``limit`` is their convex hull (display/compatibility only —
    the union may be wider than any convex cone can express); ``thickened``
    are the axis rays approached from both sides at every finite time.
    """

    limit: Cone2
    thickened: frozenset[RatVec2] = field(default_factory=frozenset)
    pieces: tuple[Cone2, ...] = ()

    def __post_init__(self) -> None:
        for d in self.thickened:
            if not cone_contains(self.limit, d):
                raise ValueError("thickened ray must belong to the limit cone")


@dataclass(frozen=True)
class EscapeCurveSpec:
    """Parameters of an escape curve C(t) = exp(r*t + g(t)*p)."""

    r: RatVec2
    p: RatVec2
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        if self.r.is_zero():
            raise ValueError("r must be nonzero")
        if self.r.dot(self.p) != 0:
            raise ValueError("p must be perpendicular to r")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")


def limit_tangent_cone(r: RatVec2) -> tuple[Cone2, bool]:
    """Limiting-tangent contribution of the single direction ``r``.

    Returns ``(cone, thickened)`` where ``thickened`` marks the generic case
    of a single axis ray approached from both sides.
    """
    if r.is_zero():
        raise ValueError("r must be nonzero")
    r = r.primitive()
    r1, r2 = r.x1, r.x2
    if r1 == r2:
        return (_Q1, False) if r1 > 0 else (_Q3, False)
    if r2 == 0 and r1 < 0:
        return (_HALF_X_NONPOS, False)
    if r1 == 0 and r2 < 0:
        return (_HALF_Y_NONPOS, False)
    # generic: the coordinate with the larger exponent dominates the tangent
    if r1 > r2:
        axis = vec(1, 0) if r1 > 0 else vec(-1, 0)
    else:
        axis = vec(0, 1) if r2 > 0 else vec(0, -1)
    return (Cone2.ray(axis), True)


def _boundary_contribution(r: RatVec2, inward_ccw: bool) -> tuple[Cone2, bool]:
    """Contribution of a sector boundary ray, with offsets forced inward.

    ``inward_ccw`` is True when the sector lies counterclockwise of ``r``
    (``r`` is the sector's start ray).  Only diagonal directions differ from
    the unrestricted table: large inward offsets pin their tangent to the
    axis on the inward side.
    """
    r = r.primitive()
    if r.x1 == r.x2:
        if r.x1 > 0:  # along (1, 1)
            axis = vec(0, 1) if inward_ccw else vec(1, 0)
        else:  # along (-1, -1)
            axis = vec(-1, 0) if inward_ccw else vec(0, -1)
        return (Cone2.ray(axis), True)
    return limit_tangent_cone(r)


_SPECIALS = (vec(1, 1), vec(0, -1), vec(-1, -1), vec(-1, 0))


def _arc_order_key(u: RatVec2):
    def cmp(p: RatVec2, q: RatVec2) -> int:
        c = p.cross(q)
        if c > 0:
            return -1
        if c < 0:
            return 1
        return 0

    return functools.cmp_to_key(cmp)


def _interior_samples(u: RatVec2, w: RatVec2) -> list[RatVec2]:
    """Directions sampling every constant piece of the *open* arc u -> w.

    The arc is counterclockwise with opening angle in (0, pi].  Returns
    every special direction strictly inside and one representative for each
    open sub-arc between consecutive stops.
    """
    def strictly_inside(s: RatVec2) -> bool:
        c = u.cross(w)
        if c > 0:
            return u.cross(s) > 0 and s.cross(w) > 0
        # half-plane arc (w == -u)
        return u.cross(s) > 0

    inside = [s for s in _SPECIALS if strictly_inside(s)]
    inside.sort(key=_arc_order_key(u))
    stops = [u] + inside + [w]
    samples: list[RatVec2] = list(inside)
    for a, b in zip(stops, stops[1:]):
        m = _strictly_between(a.primitive(), b.primitive())
        if m is not None:
            samples.append(m)
    return samples


def escape_cone(fan: Fan2, cell: Cell) -> EscapeCone:
    """The escape-direction cone of a non-origin cell of ``fan``."""
    if cell.tag is CellTag.ORIGIN:
        raise ValueError("escape directions are undefined for the origin cell")
    contributions: list[tuple[Cone2, bool]] = []
    if cell.tag is CellTag.RAY:
        contributions.append(limit_tangent_cone(fan.rays[cell.index]))
    else:
        u = fan.rays[cell.index]
        w = fan.rays[(cell.index + 1) % fan.n]
        contributions.append(_boundary_contribution(u, inward_ccw=True))
        contributions.append(_boundary_contribution(w, inward_ccw=False))
        for s in _interior_samples(u, w):
            contributions.append(limit_tangent_cone(s))
    pieces: list[Cone2] = []
    thick: set[RatVec2] = set()
    for c, is_thick in contributions:
        if c not in pieces:
            pieces.append(c)
        if is_thick:
            thick.add(c.a)
    return EscapeCone(
        limit=cone_hull(pieces),
        thickened=frozenset(thick),
        pieces=tuple(pieces),
    )


def sample_escape_tangent(spec: EscapeCurveSpec, t: float) -> tuple[float, float]:
    """Normalized tangent of C(t) = exp(r*t + g(t)*p), evaluated in floats.

    ``r`` is unit-normalized before evaluation.  Serves as the independent
    numeric oracle for :func:`limit_tangent_cone`.  Overflow is avoided by
    factoring out the largest exponent before normalizing.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    r1, r2 = spec.r.as_floats()
    nrm = math.hypot(r1, r2)
    r1, r2 = r1 / nrm, r2 / nrm
    p1, p2 = spec.p.as_floats()
    alpha = float(spec.alpha)
    beta = float(spec.beta)
    g = 1.0 - alpha * math.exp(-beta * t)
    gp = alpha * beta * math.exp(-beta * t)
    X1 = r1 * t + g * p1
    X2 = r2 * t + g * p2
    m = max(X1, X2)
    v1 = (r1 + gp * p1) * math.exp(X1 - m)
    v2 = (r2 + gp * p2) * math.exp(X2 - m)
    n = math.hypot(v1, v2)
    if n == 0:
        raise ValueError("degenerate tangent")
    return (v1 / n, v2 / n)
