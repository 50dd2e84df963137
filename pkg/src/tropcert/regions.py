"""Forward-invariant polygons for certified cone differential inclusions.

A positive certificate guarantees that around every 1-dimensional cell of the
fan there is a line direction ``v`` supporting the admissible velocity cone:
``cross(w, v) >= 0`` for every admissible ``w``, with the escape directions
weakly on the other side.  A closed polygon whose edges all lie on such
supporting lines — each edge checked against every cell its points can touch
— is forward invariant: no admissible velocity crosses it outward.

The constructor is a heuristic rendering of that picture: scaffold curves
confined to fattened cells carry the vertices, consecutive vertices are
joined by supporting-line segments found by sliding along the curves, and
two buffer lines (a vertical one through the west-pointing cell and a
horizontal one through the south-pointing cell) close the loop.  The
verifier is
the soundness anchor: it recomputes a conservative superset of the cells each
edge touches and checks every edge inequality in exact rational arithmetic.
A polygon is only ever returned after verification passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from .certify import certify_te
from .escape import EscapeCone, escape_cone
from .geometry import (
    Cell,
    CellTag,
    Cone2,
    ConeKind,
    Fan2,
    RatVec2,
    angular_key,
    cone_contains,
    cone_from_generators,
    locate_cells_log,
    vec,
)
from .inclusions import ConeDI

Rational = Union[int, Fraction]

_CENTER = RatVec2(1, 1)


class RegionError(ValueError):
    """Raised when polygon construction or verification cannot proceed."""


# ---------------------------------------------------------------------------
# Scaffold curves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaffoldCurve:
    """The curve S(t) = (a1*t^m1, a2*t^m2) for t > t0.

    For the cell it is assigned to, log S(t) eventually stays inside the
    fattened region: its log image is the affine line C + u*(m1, m2) with
    C = (log a1, log a2).
    """

    a1: Fraction
    a2: Fraction
    m1: Fraction
    m2: Fraction
    t0: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", Fraction(self.a1))
        object.__setattr__(self, "a2", Fraction(self.a2))
        object.__setattr__(self, "m1", Fraction(self.m1))
        object.__setattr__(self, "m2", Fraction(self.m2))
        object.__setattr__(self, "t0", Fraction(self.t0))
        if self.a1 <= 0 or self.a2 <= 0:
            raise ValueError("coefficients must be positive")
        if self.m1 == 0 and self.m2 == 0:
            raise ValueError("exponents must not both vanish")
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        object.__setattr__(
            self,
            "_floats",
            (float(self.a1), float(self.a2), float(self.m1), float(self.m2)),
        )

    def direction(self) -> RatVec2:
        return RatVec2(self.m1, self.m2).primitive()

    def point(self, t: float) -> tuple[float, float]:
        if t <= 0:
            raise ValueError("t must be positive")
        fa1, fa2, fm1, fm2 = self._floats
        try:
            p1 = fa1 * math.pow(t, fm1)
        except OverflowError:
            p1 = math.inf
        try:
            p2 = fa2 * math.pow(t, fm2)
        except OverflowError:
            p2 = math.inf
        return (p1, p2)

    def logpoint(self, t: float) -> tuple[float, float]:
        u = math.log(t)
        return (
            math.log(float(self.a1)) + float(self.m1) * u,
            math.log(float(self.a2)) + float(self.m2) * u,
        )

    def tangent(self, t: float) -> tuple[float, float]:
        """dS/dt (unnormalized)."""
        return (
            float(self.a1) * float(self.m1) * math.pow(t, float(self.m1) - 1.0),
            float(self.a2) * float(self.m2) * math.pow(t, float(self.m2) - 1.0),
        )

    def clockwise_normal(self, t: float) -> tuple[float, float]:
        dx, dy = self.tangent(t)
        return (dy, -dx)


_SPECIAL_DIRS = (vec(-1, -1), vec(0, 1), vec(1, 1), vec(1, 0))


def _two_sided_offsets(d: RatVec2) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
    """Rational coefficient pairs displacing a ray curve to either side.

    The log offset C = (±log 2, ±log 2) follows the sign pattern of the
    counterclockwise perpendicular of ``d`` (first pair) and its negation
    (second pair); |cross(d_hat, C)| <= sqrt(2)*log 2, well inside any strip
    of half-width > 1.
    """
    p = d.perp()

    def coeff(s: Fraction) -> Fraction:
        if s > 0:
            return Fraction(2)
        if s < 0:
            return Fraction(1, 2)
        return Fraction(1)

    ccw = (coeff(p.x1), coeff(p.x2))
    cw = (coeff(-p.x1), coeff(-p.x2))
    return ccw, cw


def assign_scaffolds(di: ConeDI) -> dict[Cell, list[ScaffoldCurve]]:
    """One guiding curve per cell; two for cells holding a special direction.

    The special directions are (-1,-1), (0,1), (1,1), (1,0).  A cell whose
    relative interior contains one of them gets a pair of curves straddling
    it: with distinct exponent ratios when the cell is two-dimensional, and
    with coefficient offsets to either side when it is a ray.  Pairs are
    listed clockwise-first (the member on the counterclockwise side of the
    special direction comes first).  Degenerate 2-ray fans are refused.
    """
    fan = di.fan
    if fan.n < 3:
        raise RegionError("need at least 3 rays to build a bounded region")
    out: dict[Cell, list[ScaffoldCurve]] = {}
    for i, d in enumerate(fan.rays):
        cell = Cell.ray(i)
        special = next(
            (s for s in _SPECIAL_DIRS if d.cross(s) == 0 and d.dot(s) > 0), None
        )
        if special is None:
            out[cell] = [ScaffoldCurve(1, 1, d.x1, d.x2)]
        else:
            ccw, cw = _two_sided_offsets(d)
            out[cell] = [
                ScaffoldCurve(ccw[0], ccw[1], d.x1, d.x2),
                ScaffoldCurve(cw[0], cw[1], d.x1, d.x2),
            ]
    for i in range(fan.n):
        cell = Cell.sector(i)
        cone = fan.sector_cone(i)
        u = fan.rays[i]
        w = fan.rays[(i + 1) % fan.n]
        mid = cone.interior_direction()
        inside = [
            s
            for s in _SPECIAL_DIRS
            if cone_contains(cone, s, strict=True)
        ]
        if not inside:
            out[cell] = [ScaffoldCurve(1, 1, mid.x1, mid.x2)]
            continue
        curves: list[ScaffoldCurve] = []
        for s in inside:
            sp = s.primitive()
            first = (sp + w.primitive()).primitive()  # ccw of s: met first clockwise
            second = (u.primitive() + sp).primitive()
            curves.append(ScaffoldCurve(1, 1, first.x1, first.x2))
            curves.append(ScaffoldCurve(1, 1, second.x1, second.x2))
        curves.sort(key=lambda c: angular_key(c.direction()), reverse=True)
        out[cell] = curves
    return out


def scaffold_in_fat_margin(
    fan: Fan2, cell: Cell, curve: ScaffoldCurve, ts: Sequence[float]
) -> float:
    """Smallest membership margin (log units) of log S(t) in the fat cell.

    Positive means every sampled point lies inside the cell's fattened
    region with that much slack; negative means some sample falls outside.
    """
    from .geometry import _ray_distance

    L = fan.log_halfwidth()
    worst = math.inf
    for t in ts:
        X = curve.logpoint(t)
        dists = [_ray_distance(X, d) for d in fan.rays]
        if cell.tag is CellTag.ORIGIN:
            margin = L - sorted(dists)[1]
        elif cell.tag is CellTag.RAY:
            margin = L - dists[cell.index]
        else:
            i = cell.index
            u, w = fan.rays[i], fan.rays[(i + 1) % fan.n]
            ux, uy = u.as_floats()
            wx, wy = w.as_floats()
            nu, nw = math.hypot(ux, uy), math.hypot(wx, wy)
            s1 = (ux * X[1] - uy * X[0]) / nu
            s2 = (X[0] * wy - X[1] * wx) / nw
            margin = min(s1, s2, dists[i] - L, dists[(i + 1) % fan.n] - L)
        worst = min(worst, margin)
    return worst


# ---------------------------------------------------------------------------
# Separating directions (claim-case decision table)
# ---------------------------------------------------------------------------


class ClaimCase(Enum):
    THIRD_QUADRANT = "third-quadrant"
    DIAGONAL_MINUS = "diagonal-minus"
    SECOND_QUADRANT = "second-quadrant"
    FIRST_QUADRANT_UPPER = "first-quadrant-upper"
    DIAGONAL_PLUS = "diagonal-plus"
    FOURTH_QUADRANT = "fourth-quadrant"


def support_direction_cone(K: Cone2) -> Cone2:
    """All v with cross(w, v) >= 0 for every w in K (K weakly ccw of v)."""
    if K.kind is ConeKind.ZERO:
        return Cone2.full()
    if K.kind is ConeKind.RAY:
        return Cone2.halfplane(K.a)
    if K.kind is ConeKind.LINE:
        return Cone2.line(K.a)
    if K.kind is ConeKind.WEDGE:
        return Cone2.wedge(K.b, -K.a)
    if K.kind is ConeKind.HALFPLANE:
        return Cone2.ray(-K.a)
    raise RegionError("a full velocity cone admits no supporting line")


def _case_rank(case: ClaimCase, v: RatVec2) -> int:
    x, y = v.x1, v.x2
    if case is ClaimCase.THIRD_QUADRANT:
        if y > 0:
            return 3
        if x < 0 and y == 0:
            return 1
        return 0
    if case is ClaimCase.SECOND_QUADRANT:
        if x > 0:
            return 3
        if x == 0 and y > 0:
            return 1
        return 0
    if case is ClaimCase.FIRST_QUADRANT_UPPER:
        if x > 0:
            return 3
        if x == 0 and y < 0:
            return 1
        return 0
    if case is ClaimCase.FOURTH_QUADRANT:
        if y < 0:
            return 3
        if y == 0 and x != 0:
            return 1
        return 0
    if case is ClaimCase.DIAGONAL_MINUS:
        if y >= 0 and x <= 0:
            return 1 + int(y > 0) + int(x < 0)
        return 0
    if case is ClaimCase.DIAGONAL_PLUS:
        if x >= 0 and y <= 0:
            return 1 + int(x > 0) + int(y < 0)
        return 0
    raise ValueError(f"unknown case {case}")


def separating_direction(
    K: Cone2,
    B: EscapeCone,
    claim_case: Union[ClaimCase, str],
    separate: bool = True,
) -> RatVec2:
    """A direction whose line supports K with the escape set weakly opposite.

    The returned v satisfies cross(w, v) >= 0 for all w in K.  Among the
    admissible candidate lines, those with every escape piece weakly on the
    clockwise side (cross(b, v) <= 0) are preferred; the claim case then
    selects the orientation/extremality preference, and ties are resolved by
    taking the interior of the hull of the best candidates.  With
    ``separate=False`` the escape-side preference is skipped and only the
    support condition plus the case ranking decide (used for the short
    connector edges next to the buffer lines, where a transversal direction
    matters more than escape-side separation).
    """
    if isinstance(claim_case, str):
        claim_case = ClaimCase(claim_case)
    A = support_direction_cone(K)
    candidates: list[RatVec2] = []
    if A.kind is ConeKind.FULL:
        candidates = [
            vec(1, 0), vec(1, 1), vec(0, 1), vec(-1, 1),
            vec(-1, 0), vec(-1, -1), vec(0, -1), vec(1, -1),
        ]
    else:
        candidates.extend(A.extreme_generators())
        if A.is_solid():
            candidates.append(A.interior_direction())

    def admissible_reps(p: RatVec2) -> list[RatVec2]:
        return [q for q in (p, -p) if cone_contains(A, q)]

    def b_side(q: RatVec2) -> bool:
        for piece in B.pieces:
            for g in piece.generators():
                if g.cross(q) > 0:
                    return False
        return True

    reps: list[RatVec2] = []
    seen: set[tuple] = set()
    for p in candidates:
        for q in admissible_reps(p):
            key = (q.x1, q.x2)
            if key not in seen:
                seen.add(key)
                reps.append(q)
    if not reps:
        raise RegionError("no supporting direction exists for this cone")
    separated = [q for q in reps if b_side(q)] if separate else []
    pool = separated if separated else reps
    best = max(_case_rank(claim_case, q) for q in pool)
    top = [q for q in pool if _case_rank(claim_case, q) == best]
    if len(top) == 1:
        return top[0]
    hull = cone_from_generators(top)
    if hull.is_solid() and hull.kind is not ConeKind.FULL:
        mid = hull.interior_direction()
        if cone_contains(A, mid) and (not separated or b_side(mid)):
            return mid
    return top[0]


# ---------------------------------------------------------------------------
# Gamma sliding (segment/curve intersection continuation)
# ---------------------------------------------------------------------------


def _nearest_root(h, t_seed: float, ratio: float = 1.25, span: int = 140) -> float:
    """Root of h nearest t_seed on a geometric grid, refined by bisection
    in log t to relative tolerance 1e-12."""
    grid_t: dict[int, float] = {}
    grid_v: dict[int, float] = {}

    def at(k: int) -> tuple[float, float]:
        if k not in grid_t:
            t = t_seed * ratio ** k
            grid_t[k] = t
            grid_v[k] = h(t)
        return grid_t[k], grid_v[k]

    bracket: Optional[tuple[float, float]] = None
    for off in range(0, span):
        for idx in (-off - 1, off):
            ta, va = at(idx)
            tb, vb = at(idx + 1)
            if va == 0.0:
                return ta
            if math.isfinite(va) and math.isfinite(vb) and va * vb < 0:
                bracket = (ta, tb)
                break
        if bracket:
            break
    if bracket is None:
        raise RegionError(
            f"no sign change in [{t_seed * ratio ** -span:.3g}, "
            f"{t_seed * ratio ** span:.3g}]"
        )
    lo, hi = bracket
    flo = h(lo)
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        fm = h(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= 1e-12 * lo:
            break
    return math.sqrt(lo * hi)


def slide_gamma(
    s1: ScaffoldCurve,
    s2: ScaffoldCurve,
    v: RatVec2,
    tau: float,
    t_seed: float,
) -> float:
    """Parameter t on s2 where the line through s1(tau) with direction v meets s2.

    Solves cross(s2(t) - s1(tau), v) = 0 by bracketed bisection in log t,
    continued from the sign change nearest t_seed, to relative tolerance
    1e-12.  Preconditions: the largest exponents of both curves share a
    nonzero sign, and v is transversal to s1 at tau.
    """
    sg1 = _sgn(max(s1.m1, s1.m2))
    sg2 = _sgn(max(s2.m1, s2.m2))
    if sg1 == 0 or sg1 != sg2:
        raise RegionError(
            "sliding requires the dominant exponents to share a nonzero sign"
        )
    vx, vy = v.as_floats()
    px, py = s1.point(tau)
    tx, ty = s1.tangent(tau)
    tn = math.hypot(tx, ty) * math.hypot(vx, vy)
    if tn == 0 or abs(tx * vy - ty * vx) <= 1e-12 * tn:
        raise RegionError("direction is tangent to the first curve at tau")

    def h(t: float) -> float:
        qx, qy = s2.point(t)
        return (qx - px) * vy - (qy - py) * vx

    return _nearest_root(h, t_seed)


def _sgn(q: Fraction) -> int:
    return (q > 0) - (q < 0)


# ---------------------------------------------------------------------------
# Polygon types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionEdge:
    """One polygon edge: direction, inward normal, governing ray cell."""

    direction: RatVec2
    normal: RatVec2
    cell: Cell
    touched: tuple[Cell, ...] = ()


@dataclass(frozen=True)
class InvariantPolygon:
    """A simple positive polygon whose edges lie on supporting lines.

    ``vertices`` are cyclic; edge j runs from vertices[j-1] to vertices[j].
    Normals point toward the interior (det(n, v) > 0 for every edge).
    """

    vertices: tuple[RatVec2, ...]
    edges: tuple[RegionEdge, ...]
    t_hat: float
    contains_origin_region: bool = False
    vertex_scaffolds: tuple[tuple[ScaffoldCurve, ...], ...] = ()

    def __post_init__(self) -> None:
        if len(self.vertices) < 3 or len(self.vertices) != len(self.edges):
            raise ValueError("need one edge per vertex, at least 3")
        for p in self.vertices:
            if p.x1 <= 0 or p.x2 <= 0:
                raise ValueError("vertices must be strictly positive")
        for j, e in enumerate(self.edges):
            if e.normal != RatVec2(e.direction.x2, -e.direction.x1).primitive():
                raise ValueError(f"edge {j}: normal is not the clockwise normal")
            w = self.vertices[j] - self.vertices[j - 1]
            if w.cross(e.direction) != 0 or w.dot(e.direction) <= 0:
                raise ValueError(f"edge {j}: direction disagrees with vertices")

    def edge_segments(self) -> list[tuple[RatVec2, RatVec2]]:
        return [
            (self.vertices[j - 1], self.vertices[j])
            for j in range(len(self.vertices))
        ]


@dataclass(frozen=True)
class EdgeCellCheck:
    edge_index: int
    cell: Cell
    min_inner: Fraction  # min over extreme generators w of K(cell) of w . n


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[EdgeCellCheck, ...]
    touched: tuple[tuple[Cell, ...], ...]
    passed: bool
    tol: float

    def worst(self) -> Optional[EdgeCellCheck]:
        return min(self.checks, key=lambda c: c.min_inner, default=None)

    def failures(self) -> list[EdgeCellCheck]:
        return [c for c in self.checks if c.min_inner < 0]


# ---------------------------------------------------------------------------
# Point-in-polygon (exact)
# ---------------------------------------------------------------------------


def _on_segment(p: RatVec2, a: RatVec2, b: RatVec2) -> bool:
    if (b - a).cross(p - a) != 0:
        return False
    return min(a.x1, b.x1) <= p.x1 <= max(a.x1, b.x1) and min(
        a.x2, b.x2
    ) <= p.x2 <= max(a.x2, b.x2)


def point_in_polygon(poly: InvariantPolygon, x: tuple) -> bool:
    """Exact membership (boundary counts as inside) via crossing number."""
    p = RatVec2(Fraction(x[0]), Fraction(x[1]))
    inside = False
    for a, b in poly.edge_segments():
        if _on_segment(p, a, b):
            return True
        # half-open crossing rule on the horizontal ray toward +x
        if (a.x2 > p.x2) != (b.x2 > p.x2):
            t = (p.x2 - a.x2) / (b.x2 - a.x2)
            xint = a.x1 + t * (b.x1 - a.x1)
            if xint > p.x1:
                inside = not inside
    return inside


def _segments_cross(a: RatVec2, b: RatVec2, c: RatVec2, d: RatVec2) -> bool:
    d1 = (b - a).cross(c - a)
    d2 = (b - a).cross(d - a)
    d3 = (d - c).cross(a - c)
    d4 = (d - c).cross(b - c)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _is_simple(vertices: Sequence[RatVec2]) -> bool:
    n = len(vertices)
    segs = [(vertices[j - 1], vertices[j]) for j in range(n)]
    # float bounding-box prefilter; exact crossing test only on candidates
    boxes = []
    for p, q in segs:
        px, py = p.as_floats()
        qx, qy = q.as_floats()
        pad = 1e-9
        boxes.append((
            min(px, qx) * (1 - pad), max(px, qx) * (1 + pad),
            min(py, qy) * (1 - pad), max(py, qy) * (1 + pad),
        ))
    for i in range(n):
        bi = boxes[i]
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            bj = boxes[j]
            if bi[1] < bj[0] or bj[1] < bi[0] or bi[3] < bj[2] or bj[3] < bi[2]:
                continue
            if _segments_cross(*segs[i], *segs[j]):
                return False
    return True


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _case_for(d: RatVec2) -> ClaimCase:
    if d.cross(vec(1, 1)) == 0:
        return ClaimCase.DIAGONAL_PLUS if d.x1 > 0 else ClaimCase.DIAGONAL_MINUS
    if d.x1 <= 0 and d.x2 <= 0:
        return ClaimCase.THIRD_QUADRANT
    if d.x1 <= 0:
        return ClaimCase.SECOND_QUADRANT
    if d.x2 <= 0:
        return ClaimCase.FOURTH_QUADRANT
    # open first quadrant, off the diagonal
    if vec(1, 1).cross(d) > 0:
        return ClaimCase.FIRST_QUADRANT_UPPER
    return ClaimCase.FOURTH_QUADRANT


def _origin_corners(fan: Fan2) -> list[tuple[float, float]]:
    """Approximate outer corners of the fattened origin region (log space)."""
    L = fan.log_halfwidth()
    out = []
    n = fan.n
    for i in range(n):
        u = fan.rays[i]
        w = fan.rays[(i + 1) % n]
        ux, uy = u.as_floats()
        wx, wy = w.as_floats()
        nu, nw = math.hypot(ux, uy), math.hypot(wx, wy)
        ux, uy, wx, wy = ux / nu, uy / nu, wx / nw, wy / nw
        # solve cross(u, X) = L, cross(X, w) = L  (unit u, w): the corner at
        # signed distance L counterclockwise of u and L clockwise of w
        #   -uy*X1 + ux*X2 = L ;  X1*wy - X2*wx = L
        a11, a12, b1 = -uy, ux, L
        a21, a22, b2 = wy, -wx, L
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-12:
            continue
        X1 = (b1 * a22 - b2 * a12) / det
        X2 = (a11 * b2 - a21 * b1) / det
        out.append((X1, X2))
    return out


def _cell_rep(fan: Fan2, cell: Cell) -> RatVec2:
    if cell.tag is CellTag.RAY:
        return fan.rays[cell.index]
    return fan.sector_cone(cell.index).interior_direction()


def _find_buffer_cell(fan: Fan2, d: RatVec2) -> Cell:
    """The unique cell whose relative interior contains direction ``d``."""
    for i, r in enumerate(fan.rays):
        if r.cross(d) == 0 and r.dot(d) > 0:
            return Cell.ray(i)
    for i in range(fan.n):
        if cone_contains(fan.sector_cone(i), d, strict=True):
            return Cell.sector(i)
    raise RegionError(f"no fan cell contains direction {d}")


def _meet_curve(P: RatVec2, v: RatVec2, curve: ScaffoldCurve, t_seed: float) -> float:
    """Parameter where the line through P with direction v meets the curve.

    Besides the caller's seed, parameters matching each coordinate of P on
    the curve are tried (the intersection usually shares a coordinate scale
    with P); among the roots found, the one whose curve point is log-nearest
    to P wins.
    """
    px, py = float(P.x1), float(P.x2)
    vx, vy = v.as_floats()

    def h(t: float) -> float:
        qx, qy = curve.point(t)
        return (qx - px) * vy - (qy - py) * vx

    seeds = [t_seed]
    for coord, mm, aa in ((px, curve.m1, curve.a1), (py, curve.m2, curve.a2)):
        if mm != 0:
            s = math.exp(math.log(coord / float(aa)) / float(mm))
            if math.isfinite(s) and s > 0:
                seeds.append(s)

    lp = (math.log(px), math.log(py))
    roots: list[float] = []
    err: Optional[RegionError] = None
    for s in seeds:
        try:
            roots.append(_nearest_root(h, s))
        except RegionError as e:
            err = e
    if not roots:
        assert err is not None
        raise err

    def log_dist(t: float) -> float:
        qx, qy = curve.point(t)
        if not (0 < qx < math.inf and 0 < qy < math.inf):
            return math.inf
        return math.hypot(math.log(qx) - lp[0], math.log(qy) - lp[1])

    return min(roots, key=log_dist)


def _seed_radius(curve: ScaffoldCurve, t_hat: float) -> tuple[RatVec2, float]:
    """Exact point near the curve at log-space radius about t_hat."""
    mnorm = math.hypot(float(curve.m1), float(curve.m2))
    t = math.exp(t_hat / mnorm)
    x, y = curve.point(t)
    return RatVec2(Fraction(x), Fraction(y)), t


def _seed_coord(
    curve: ScaffoldCurve, axis: int, target: Fraction
) -> tuple[RatVec2, float]:
    """Exact point near the curve whose coordinate ``axis`` equals target."""
    mm = curve.m1 if axis == 0 else curve.m2
    aa = curve.a1 if axis == 0 else curve.a2
    if mm == 0:
        raise RegionError("cannot pin a coordinate the curve is constant in")
    t = math.exp(math.log(float(target) / float(aa)) / float(mm))
    x, y = curve.point(t)
    if axis == 0:
        return RatVec2(Fraction(target), Fraction(y)), t
    return RatVec2(Fraction(x), Fraction(target)), t


_COMPASS = (
    vec(1, 0), vec(1, 1), vec(0, 1), vec(-1, 1),
    vec(-1, 0), vec(-1, -1), vec(0, -1), vec(1, -1),
)


def _support_reps(K: Cone2) -> list[RatVec2]:
    """Candidate supporting directions of K, both orientations where valid."""
    A = support_direction_cone(K)
    if A.kind is ConeKind.FULL:
        cands: list[RatVec2] = list(_COMPASS)
    else:
        cands = list(A.extreme_generators())
        if A.is_solid():
            cands.append(A.interior_direction())
    reps: list[RatVec2] = []
    seen: set[tuple] = set()
    for p in cands:
        for q in (p, -p):
            if cone_contains(A, q):
                key = (q.x1, q.x2)
                if key not in seen:
                    seen.add(key)
                    reps.append(q)
    return reps


def _connector(
    di: ConeDI, cell: Cell, P: RatVec2, coord: int
) -> tuple[RatVec2, bool]:
    """Direction for the edge joining a chain endpoint to a buffer line.

    ``coord`` names the buffer coordinate (0: the vertical line x = x*, 1:
    the horizontal line y = y*).  The returned direction, read in clockwise
    traversal order, must support K(cell) and keep (1, 1) strictly on the
    inward (clockwise-normal) side of the line through P.  Which side of P
    the buffer line must lie on follows from the sign of the direction's
    buffer-coordinate component; the caller places the line accordingly.
    Returns ``(v, merge)`` with ``merge=True`` when the only admissible
    supporting line is buffer-parallel, in which case the buffer line must
    pass through P itself.
    """
    fan = di.fan
    reps = _support_reps(di.cones[cell])
    c = _CENTER - P
    comp = (lambda q: q.x1) if coord == 0 else (lambda q: q.x2)
    good = [q for q in reps if comp(q) != 0 and q.cross(c) < 0]
    if good:
        A = support_direction_cone(di.cones[cell])
        B = escape_cone(fan, cell)
        case = _case_for(_cell_rep(fan, cell))

        def score(q: RatVec2) -> tuple:
            b_ok = all(
                g.cross(q) <= 0 for piece in B.pieces for g in piece.generators()
            )
            strict = cone_contains(A, q, strict=True)
            return (_case_rank(case, q), b_ok, strict)

        return max(good, key=score), False
    # buffer-parallel fallback: must match the buffer edge's own traversal
    # (the vertical line runs upward, the horizontal line runs leftward)
    for q in reps:
        if comp(q) == 0:
            oriented = q.x2 > 0 if coord == 0 else q.x1 < 0
            if oriented and q.cross(c) < 0:
                return q, True
    raise RegionError(f"no usable connector direction for {cell}")


def _propagate(
    di: ConeDI,
    entries: Sequence[tuple[Cell, ScaffoldCurve]],
    P0: RatVec2,
    t0: float,
) -> tuple[list[RatVec2], list[Cell]]:
    """Slide from curve to curve along supporting directions.

    Each step intersects the supporting line through the current vertex with
    the next curve (float root-find) and lands exactly on the line at the
    nearest rational point.  Returns the vertices and, per step, the cell
    governing the connecting edge (the lower-dimensional of the two, or the
    common cell for the two curves of a special cell).
    """
    fan = di.fan
    pts = [P0]
    gov: list[Cell] = []
    for idx in range(1, len(entries)):
        cA, _ = entries[idx - 1]
        cB, curve = entries[idx]
        if cA == cB or cA.tag is CellTag.RAY:
            q = cA
        else:
            q = cB
        v = separating_direction(
            di.cones[q], escape_cone(fan, q), _case_for(_cell_rep(fan, q))
        )
        P = pts[-1]
        px, py = float(P.x1), float(P.x2)
        if not (0 < px < math.inf and 0 < py < math.inf):
            raise RegionError("chain vertex left the representable range")
        r_cur = math.hypot(math.log(px), math.log(py))
        mnorm = math.hypot(float(curve.m1), float(curve.m2))
        t_seed = math.exp(max(r_cur, 1.0) / mnorm)
        t_root = _meet_curve(P, v, curve, t_seed)
        qx, qy = curve.point(t_root)
        # land exactly on the line through P: pin the coordinate whose
        # root-finding error perturbs the other coordinate the least
        vx, vy = v.as_floats()
        if v.x1 != 0 and (v.x2 == 0 or abs(vy) * qx <= abs(vx) * qy):
            s = (Fraction(qx) - P.x1) / v.x1
        else:
            s = (Fraction(qy) - P.x2) / v.x2
        P_next = P + v.scale(s)
        if P_next == P:
            raise RegionError(f"sliding step for {q} collapsed to a point")
        if P_next.x1 <= 0 or P_next.x2 <= 0:
            raise RegionError(
                f"sliding step for {q} left the open positive quadrant"
            )
        pts.append(P_next)
        gov.append(q)
    return pts, gov


def _build_polygon(
    di: ConeDI, t_hat: float, scaffolds: dict[Cell, list[ScaffoldCurve]]
) -> InvariantPolygon:
    """Assemble the boundary as two curve chains closed by two buffer lines.

    The vertical line x = x* crosses the cell containing the west direction
    and the horizontal line y = y* the cell containing south; both cells'
    velocity cones lie in the supported half-plane of those lines, so the
    lines absorb the closure mismatch of the chains.  Everything else is a
    chain of scaffold-curve vertices joined by supporting-line segments.
    """
    fan = di.fan
    n = fan.n
    L = fan.log_halfwidth()
    if t_hat <= 2 * (L + 1):
        raise RegionError(
            f"t_hat = {t_hat} too small: need > {2 * (L + 1):.3f} to clear "
            "the fattened origin region"
        )
    order = sorted(range(n), key=lambda i: angular_key(fan.rays[i]), reverse=True)
    # clockwise interleaving: after ray i comes the sector ending at ray i
    cells_cw: list[Cell] = []
    for i in order:
        cells_cw.append(Cell.ray(i))
        cells_cw.append(Cell.sector((i - 1) % n))

    south_cell = _find_buffer_cell(fan, vec(0, -1))
    west_cell = _find_buffer_cell(fan, vec(-1, 0))

    def cyclic_between(a: Cell, b: Cell) -> list[Cell]:
        out: list[Cell] = []
        if a == b:
            return out
        j = (cells_cw.index(a) + 1) % len(cells_cw)
        stop = cells_cw.index(b)
        while j != stop:
            out.append(cells_cw[j])
            j = (j + 1) % len(cells_cw)
        return out

    if south_cell == west_cell:
        # one cell carries both buffer lines, meeting at the corner (x*, y*)
        j = cells_cw.index(south_cell)
        h1_cells: list[Cell] = []
        h2_cells = [cells_cw[(j + k) % len(cells_cw)] for k in range(1, len(cells_cw))]
    else:
        h1_cells = cyclic_between(south_cell, west_cell)
        h2_cells = cyclic_between(west_cell, south_cell)
    if not h2_cells:
        raise RegionError("no cells between the west and south buffer cells")
    h1_entries = [(c, s) for c in h1_cells for s in scaffolds[c]]
    h2_entries = [(c, s) for c in h2_cells for s in scaffolds[c]]

    x0 = Fraction(math.exp(-(t_hat + 2.0)))
    y0 = Fraction(math.exp(-(t_hat + 2.0)))

    def run_h1(seed_y: Optional[Fraction]) -> tuple[list[RatVec2], list[Cell]]:
        curve1 = h1_entries[0][1]
        if seed_y is not None:
            P1, t1 = _seed_coord(curve1, 1, seed_y)
        else:
            P1, t1 = _seed_radius(curve1, t_hat)
        return _propagate(di, h1_entries, P1, t1)

    def run_h2(seed_x: Optional[Fraction]) -> tuple[list[RatVec2], list[Cell]]:
        curve1 = h2_entries[0][1]
        if seed_x is not None:
            P1, t1 = _seed_coord(curve1, 0, seed_x)
        else:
            P1, t1 = _seed_radius(curve1, t_hat)
        return _propagate(di, h2_entries, P1, t1)

    def connector(cell: Cell, P: RatVec2, coord: int) -> tuple[RatVec2, bool]:
        return _connector(di, cell, P, coord)

    # probe pass: classify the four connector edges (transversal vs
    # buffer-parallel) at radius-seeded chain endpoints
    h2_probe = run_h2(None)
    vD0, mergeD = connector(h2_entries[0][0], h2_probe[0][0], 0)
    vA0, mergeA = connector(h2_entries[-1][0], h2_probe[0][-1], 1)
    if h1_entries:
        h1_probe = run_h1(None)
        vB0, mergeB = connector(h1_entries[0][0], h1_probe[0][0], 1)
        vC0, mergeC = connector(h1_entries[-1][0], h1_probe[0][-1], 0)
    else:
        h1_probe = ([], [])
        mergeB = mergeC = False

    def pick(default: Fraction, lo: Optional[Fraction], hi: Optional[Fraction]) -> Fraction:
        if lo is not None and hi is not None:
            if lo >= hi:
                raise RegionError("incompatible buffer-line constraints")
            if lo < default < hi:
                return default
            mid = math.exp(
                (math.log(float(lo)) + math.log(float(hi))) / 2.0
            )
            return Fraction(mid)
        if hi is not None:
            return default if default < hi else hi / 8
        if lo is not None:
            return default if default > lo else lo * 8
        return default

    # each connector direction dictates which side of the chain endpoint the
    # buffer line must lie on (so its segment points the right way in the
    # clockwise traversal): derive open bounds, then place the lines
    ylo: Optional[Fraction] = None
    yhi: Optional[Fraction] = None
    if not mergeA:
        Pm0 = h2_probe[0][-1]
        if vA0.x2 > 0:
            ylo = Pm0.x2
        else:
            yhi = Pm0.x2
    if h1_entries and not mergeB:
        P10 = h1_probe[0][0]
        if vB0.x2 > 0:
            yhi = P10.x2 if yhi is None else min(yhi, P10.x2)
        else:
            ylo = P10.x2 if ylo is None else max(ylo, P10.x2)
    xlo: Optional[Fraction] = None
    xhi: Optional[Fraction] = None
    if not mergeD:
        Pf0 = h2_probe[0][0]
        if vD0.x1 > 0:
            xhi = Pf0.x1
        else:
            xlo = Pf0.x1
    if h1_entries and not mergeC:
        Pk0 = h1_probe[0][-1]
        if vC0.x1 > 0:
            xlo = Pk0.x1 if xlo is None else max(xlo, Pk0.x1)
        else:
            xhi = Pk0.x1 if xhi is None else min(xhi, Pk0.x1)

    y_star = h2_probe[0][-1].x2 if mergeA else pick(y0, ylo, yhi)
    x_star = (
        h1_probe[0][-1].x1 if (mergeC and h1_entries) else pick(x0, xlo, xhi)
    )

    # merged connectors pin a buffer line to a chain endpoint, and a merged
    # chain seed sits on a buffer line: iterate until the positions agree
    for _ in range(4):
        h1_pts, h1_gov = run_h1(y_star) if mergeB else h1_probe
        h2_pts, h2_gov = run_h2(x_star) if mergeD else h2_probe
        ny = h2_pts[-1].x2 if mergeA else y_star
        nx = h1_pts[-1].x1 if (mergeC and h1_pts) else x_star
        if nx == x_star and ny == y_star:
            break
        x_star, y_star = nx, ny
    else:
        raise RegionError("buffer line positions did not stabilize")

    def settled(cell: Cell, P: RatVec2, coord: int) -> RatVec2:
        v, merge = connector(cell, P, coord)
        if merge:
            raise RegionError(
                f"connector for {cell} changed class between passes"
            )
        return v

    Pf, Pm = h2_pts[0], h2_pts[-1]
    if mergeA:
        A = Pm
    else:
        vA = settled(h2_entries[-1][0], Pm, 1)
        sA = (y_star - Pm.x2) / vA.x2
        if sA < 0:
            raise RegionError("horizontal buffer on the wrong side of A")
        A = Pm + vA.scale(sA)
    if h1_pts:
        P1, Pk = h1_pts[0], h1_pts[-1]
        if mergeB:
            B = P1
        else:
            vB = settled(h1_entries[0][0], P1, 1)
            sB = (y_star - P1.x2) / vB.x2
            if sB > 0:
                raise RegionError("horizontal buffer on the wrong side of B")
            B = P1 + vB.scale(sB)
        if mergeC:
            C = Pk
        else:
            vC = settled(h1_entries[-1][0], Pk, 0)
            sC = (x_star - Pk.x1) / vC.x1
            if sC < 0:
                raise RegionError("vertical buffer on the wrong side of C")
            C = Pk + vC.scale(sC)
    else:
        B = C = RatVec2(x_star, y_star)
    if mergeD:
        D = Pf
    else:
        vD = settled(h2_entries[0][0], Pf, 0)
        sD = (x_star - Pf.x1) / vD.x1
        if sD > 0:
            raise RegionError("vertical buffer on the wrong side of D")
        D = Pf + vD.scale(sD)

    # cyclic vertex/edge sequence, clockwise; each entry is
    # (vertex, cell governing the edge arriving at the vertex, curves there)
    ents: list[tuple[RatVec2, Cell, tuple[ScaffoldCurve, ...]]] = []
    ents.append((h2_pts[0], h2_entries[0][0], (h2_entries[0][1],)))
    for i in range(1, len(h2_pts)):
        ents.append((h2_pts[i], h2_gov[i - 1], (h2_entries[i][1],)))
    ents.append((A, h2_entries[-1][0], ()))
    ents.append((B, south_cell, ()))
    if h1_pts:
        ents.append((h1_pts[0], h1_entries[0][0], (h1_entries[0][1],)))
        for i in range(1, len(h1_pts)):
            ents.append((h1_pts[i], h1_gov[i - 1], (h1_entries[i][1],)))
        ents.append((C, h1_entries[-1][0], ()))
    ents.append((D, west_cell, ()))

    merged: list[list] = []
    for p, c, sc in ents:
        if merged and p == merged[-1][0]:
            merged[-1][2] = merged[-1][2] + sc
            continue
        merged.append([p, c, tuple(sc)])
    if len(merged) > 1 and merged[0][0] == merged[-1][0]:
        merged[-1][2] = merged[-1][2] + merged[0][2]
        merged.pop(0)
    if len(merged) < 3:
        raise RegionError("degenerate boundary: fewer than 3 vertices")

    vertices = [m[0] for m in merged]
    edges: list[RegionEdge] = []
    for j in range(len(vertices)):
        a, b = vertices[j - 1], vertices[j]
        w = b - a
        if w.is_zero():
            raise RegionError("zero-length edge")
        e_dir = w.primitive()
        nvec = RatVec2(e_dir.x2, -e_dir.x1).primitive()
        if nvec.dot(_CENTER - a) <= 0 or nvec.dot(_CENTER - b) <= 0:
            raise RegionError(
                f"edge for {merged[j][1]} does not keep (1,1) strictly inside"
            )
        edges.append(RegionEdge(e_dir, nvec, merged[j][1]))

    for p in vertices:
        if p.x1 <= 0 or p.x2 <= 0:
            raise RegionError("vertex left the open positive quadrant")
    if not _is_simple(vertices):
        raise RegionError("polygon is not simple")

    poly = InvariantPolygon(
        vertices=tuple(vertices),
        edges=tuple(edges),
        t_hat=t_hat,
        contains_origin_region=False,
        vertex_scaffolds=tuple(m[2] for m in merged),
    )
    contains = all(
        point_in_polygon(poly, (math.exp(X1), math.exp(X2)))
        for X1, X2 in _origin_corners(fan)
    ) and point_in_polygon(poly, (1.0, 1.0))
    return replace(poly, contains_origin_region=contains)


def _cell_key(c: Cell) -> tuple[int, int]:
    tag_order = {CellTag.ORIGIN: 0, CellTag.RAY: 1, CellTag.SECTOR: 2}
    return (tag_order[c.tag], -1 if c.index is None else c.index)


def construct_region(
    di: ConeDI, t_hat: float, allow_retry: bool = True
) -> tuple[InvariantPolygon, VerificationReport]:
    """Build and exactly verify a forward-invariant polygon.

    Requires a positive certificate.  On construction or verification
    failure the radius parameter is doubled up to three times (unless
    ``allow_retry`` is false); an unverified polygon is never returned.
    """
    cert = certify_te(di)
    if not cert.positive:
        raise RegionError("the inclusion is not certified; no region is built")
    scaffolds = assign_scaffolds(di)
    t = float(t_hat)
    last_err: Optional[Exception] = None
    attempts = 4 if allow_retry else 1
    for _ in range(attempts):
        try:
            poly = _build_polygon(di, t, scaffolds)
            report = verify_region(di, poly)
            if report.passed:
                filled = replace(
                    poly,
                    edges=tuple(
                        replace(e, touched=report.touched[j])
                        for j, e in enumerate(poly.edges)
                    ),
                )
                return filled, report
            worst = report.worst()
            last_err = RegionError(
                f"verification failed at t_hat={t}: edge {worst.edge_index} vs "
                f"{worst.cell} has min inner product {worst.min_inner}"
            )
        except RegionError as e:
            last_err = e
        t *= 2.0
    raise RegionError(f"could not build a verified region: {last_err}")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def _edge_log_samples(
    a: RatVec2, b: RatVec2, max_gap: float
) -> list[tuple[float, float]]:
    """Log-space samples of the straight x-space segment a-b, adaptively
    subdivided (in x-space midpoints) until consecutive log gaps <= max_gap."""
    ax, ay = float(a.x1), float(a.x2)
    bx, by = float(b.x1), float(b.x2)

    out: list[tuple[float, float]] = []

    def rec(px, py, qx, qy, depth):
        lp = (math.log(px), math.log(py))
        lq = (math.log(qx), math.log(qy))
        if depth >= 26 or math.hypot(lp[0] - lq[0], lp[1] - lq[1]) <= max_gap:
            out.append(lp)
            return
        mx, my = (px + qx) / 2, (py + qy) / 2
        rec(px, py, mx, my, depth + 1)
        rec(mx, my, qx, qy, depth + 1)

    rec(ax, ay, bx, by, 0)
    out.append((math.log(bx), math.log(by)))
    return out


def verify_region(
    di: ConeDI, poly: InvariantPolygon, tol: float = 1.0
) -> VerificationReport:
    """Exact supporting-line check of every edge against every touched cell.

    Touched cells are a conservative superset: edge points are sampled in log
    space with gap <= tol/2 and located with inflation tol, so any cell whose
    fattened region comes within tol/2 of the edge is included.  The inner
    products w . n are exact rationals; extra touched cells can only make the
    check stricter.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not _is_simple(poly.vertices):
        raise RegionError("polygon is not simple")
    fan = di.fan
    checks: list[EdgeCellCheck] = []
    touched_all: list[tuple[Cell, ...]] = []
    passed = True
    for j, (a, b) in enumerate(poly.edge_segments()):
        nvec = poly.edges[j].normal
        cells: set[Cell] = set()
        for X in _edge_log_samples(a, b, tol / 2):
            cells |= locate_cells_log(fan, X, tol)
        touched = tuple(sorted(cells, key=_cell_key))
        touched_all.append(touched)
        for cell in touched:
            K = di.cones[cell]
            gens = (
                K.generators() if K.kind is ConeKind.FULL else K.extreme_generators()
            )
            if not gens:
                continue
            mn = min(w.dot(nvec) for w in gens)
            checks.append(EdgeCellCheck(j, cell, mn))
            if mn < 0:
                passed = False
    return VerificationReport(
        checks=tuple(checks),
        touched=tuple(touched_all),
        passed=passed,
        tol=tol,
    )


# ---------------------------------------------------------------------------
# Nested family and the Lyapunov value
# ---------------------------------------------------------------------------


def _float_inside(verts: Sequence[tuple[float, float]], x: tuple[float, float]) -> bool:
    cnt = 0
    px, py = x
    for j in range(len(verts)):
        ax, ay = verts[j - 1]
        bx, by = verts[j]
        if (ay > py) != (by > py):
            t = (py - ay) / (by - ay)
            if px < ax + t * (bx - ax):
                cnt += 1
    return cnt % 2 == 1


class LambdaEvaluator:
    """Repeated evaluation of Lambda(x) = inf{t >= t_hat : x in R_t}.

    Regions built during bisection are cached (as float vertex lists) and a
    previous value can seed the bracket, so sweeping Lambda along a
    trajectory costs only a few region builds per point.
    """

    def __init__(
        self,
        di: ConeDI,
        seed: InvariantPolygon,
        rel_tol: float = 1e-6,
        max_doublings: int = 24,
    ) -> None:
        self.di = di
        self.seed = seed
        self.rel_tol = rel_tol
        self.max_doublings = max_doublings
        self.scaffolds = assign_scaffolds(di)
        self._geoms: dict[float, list[tuple[float, float]]] = {}

    def _inside(self, t: float, x: tuple[float, float]) -> bool:
        g = self._geoms.get(t)
        if g is None:
            poly = _build_polygon(self.di, t, self.scaffolds)
            g = [v.as_floats() for v in poly.vertices]
            self._geoms[t] = g
        return _float_inside(g, x)

    def value(self, x: tuple[float, float], hint: Optional[float] = None) -> float:
        if x[0] <= 0 or x[1] <= 0:
            raise ValueError("x must be strictly positive")
        t_hat = self.seed.t_hat
        if point_in_polygon(self.seed, x):
            return t_hat
        if hint is not None and hint > t_hat:
            # expand a window around the previous value until it brackets
            w = max(0.05 * hint, 10 * self.rel_tol * hint)
            lo, hi = max(t_hat, hint - w), hint + w
            for _ in range(self.max_doublings):
                if self._inside(hi, x):
                    break
                lo, hi = hi, hi + 2 * (hi - lo)
            else:
                raise RegionError(f"point {x} outside every region up to t = {hi}")
            while lo > t_hat and self._inside(lo, x):
                lo, hi = max(t_hat, lo - (hi - lo)), lo
        else:
            lo, hi = t_hat, t_hat
            for _ in range(self.max_doublings):
                lo = hi
                hi *= 2.0
                if self._inside(hi, x):
                    break
            else:
                raise RegionError(f"point {x} outside every region up to t = {hi}")
        while hi - lo > self.rel_tol * lo:
            mid = (lo + hi) / 2
            if self._inside(mid, x):
                hi = mid
            else:
                lo = mid
        return hi


def lyapunov_value(
    di: ConeDI,
    seed: InvariantPolygon,
    x: tuple[float, float],
    rel_tol: float = 1e-6,
    max_doublings: int = 24,
) -> float:
    """Lambda(x) = inf{t >= t_hat : x in R_t}, by monotone bisection.

    Returns t_hat when x already lies in the seed region.  Regions for
    bisection probes are rebuilt deterministically at each t (no retries,
    no re-verification: the family shares the seed's supporting directions).
    """
    return LambdaEvaluator(di, seed, rel_tol, max_doublings).value(x)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def polygon_to_document(poly: InvariantPolygon) -> dict:
    from .systems import format_rational

    def fvec(p: RatVec2) -> list:
        return [format_rational(p.x1), format_rational(p.x2)]

    def fcell(c: Cell) -> str:
        if c.tag is CellTag.ORIGIN:
            return "origin"
        return f"{c.tag.value}:{c.index}"

    return {
        "type": "polygon",
        "t_hat": repr(poly.t_hat),
        "contains_origin_region": poly.contains_origin_region,
        "vertices": [fvec(p) for p in poly.vertices],
        "edges": [
            {
                "direction": fvec(e.direction),
                "normal": fvec(e.normal),
                "cell": fcell(e.cell),
                "touched": [fcell(c) for c in e.touched],
            }
            for e in poly.edges
        ],
        "vertex_scaffolds": [
            [
                {
                    "a1": format_rational(c.a1),
                    "a2": format_rational(c.a2),
                    "m1": format_rational(c.m1),
                    "m2": format_rational(c.m2),
                    "t0": format_rational(c.t0),
                }
                for c in group
            ]
            for group in poly.vertex_scaffolds
        ],
    }


def polygon_from_document(doc: dict) -> InvariantPolygon:
    from .systems import DocumentError, parse_rational

    if doc.get("type") != "polygon":
        raise DocumentError("'type' must be 'polygon'")

    def pvec(v) -> RatVec2:
        return RatVec2(parse_rational(v[0]), parse_rational(v[1]))

    def pcell(s: str) -> Cell:
        if s == "origin":
            return Cell.origin()
        tag, idx = s.split(":")
        return Cell.ray(int(idx)) if tag == "ray" else Cell.sector(int(idx))

    return InvariantPolygon(
        vertices=tuple(pvec(v) for v in doc["vertices"]),
        edges=tuple(
            RegionEdge(
                direction=pvec(e["direction"]),
                normal=pvec(e["normal"]),
                cell=pcell(e["cell"]),
                touched=tuple(pcell(c) for c in e.get("touched", [])),
            )
            for e in doc["edges"]
        ),
        t_hat=float(doc["t_hat"]),
        contains_origin_region=bool(doc.get("contains_origin_region", False)),
        vertex_scaffolds=tuple(
            tuple(
                ScaffoldCurve(
                    parse_rational(c["a1"]),
                    parse_rational(c["a2"]),
                    parse_rational(c["m1"]),
                    parse_rational(c["m2"]),
                    parse_rational(c["t0"]),
                )
                for c in group
            )
            for group in doc.get("vertex_scaffolds", [])
        ),
    )
