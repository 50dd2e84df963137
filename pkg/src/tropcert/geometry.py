"""Exact rational 2-D vectors, convex cones, and complete fans.

Everything in this module works over exact rationals (``fractions.Fraction``).
Cone membership and all combinatorial decisions reduce to sign tests on cross
and dot products, so no floating point enters any soundness-critical decision.
The only floating-point operation is :func:`locate_cells`, which locates a
positive point in logarithmic coordinates and deliberately returns a
*superset* of matching cells controlled by a caller-supplied tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional, Sequence, Union

Rational = Union[int, Fraction]


# ---------------------------------------------------------------------------
# Vectors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RatVec2:
    """A 2-D vector with exact rational coordinates."""

    x1: Fraction
    x2: Fraction

    def __init__(self, x1: Rational, x2: Rational) -> None:
        object.__setattr__(self, "x1", Fraction(x1))
        object.__setattr__(self, "x2", Fraction(x2))

    # -- algebra ------------------------------------------------------------

    def __add__(self, other: "RatVec2") -> "RatVec2":
        return RatVec2(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: "RatVec2") -> "RatVec2":
        return RatVec2(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> "RatVec2":
        return RatVec2(-self.x1, -self.x2)

    def scale(self, k: Rational) -> "RatVec2":
        k = Fraction(k)
        return RatVec2(self.x1 * k, self.x2 * k)

    def dot(self, other: "RatVec2") -> Fraction:
        return self.x1 * other.x1 + self.x2 * other.x2

    def cross(self, other: "RatVec2") -> Fraction:
        return self.x1 * other.x2 - self.x2 * other.x1

    def perp(self) -> "RatVec2":
        """Rotate by +90 degrees: (x, y) -> (-y, x)."""
        return RatVec2(-self.x2, self.x1)

    def is_zero(self) -> bool:
        return self.x1 == 0 and self.x2 == 0

    def primitive(self) -> "RatVec2":
        """Scale to the canonical integer direction with coprime coordinates.

        Raises ``ValueError`` on the zero vector.
        """
        if self.is_zero():
            raise ValueError("zero vector has no direction")
        q = math.lcm(self.x1.denominator, self.x2.denominator)
        a = int(self.x1 * q)
        b = int(self.x2 * q)
        g = math.gcd(abs(a), abs(b))
        return RatVec2(Fraction(a // g), Fraction(b // g))

    def as_floats(self) -> tuple[float, float]:
        return (float(self.x1), float(self.x2))

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return f"({self.x1}, {self.x2})"


def vec(x1: Rational, x2: Rational) -> RatVec2:
    return RatVec2(x1, x2)


def cross(a: RatVec2, b: RatVec2) -> Fraction:
    return a.cross(b)


def dot(a: RatVec2, b: RatVec2) -> Fraction:
    return a.dot(b)


def _half_index(d: RatVec2) -> int:
    """0 for the upper half (angle in [0, pi)), 1 for the lower half."""
    if d.x2 > 0 or (d.x2 == 0 and d.x1 > 0):
        return 0
    return 1


def angular_cmp(a: RatVec2, b: RatVec2) -> int:
    """Total counterclockwise order on nonzero directions starting at (1, 0).

    Works purely with sign tests (no trigonometry): compare half-plane index
    first, then the cross product within a half-plane.
    """
    ha, hb = _half_index(a), _half_index(b)
    if ha != hb:
        return -1 if ha < hb else 1
    c = a.cross(b)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


angular_key = cmp_to_key(angular_cmp)


def ccw_angle_floats(d: RatVec2) -> float:
    """Float angle in [0, 2*pi) — for rendering and sampling only."""
    a = math.atan2(float(d.x2), float(d.x1))
    return a if a >= 0 else a + 2 * math.pi


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------


class ConeKind(Enum):
    ZERO = "zero"
    RAY = "ray"
    LINE = "line"
    WEDGE = "wedge"
    HALFPLANE = "halfplane"
    FULL = "full"


@dataclass(frozen=True)
class Cone2:
    """A canonical closed convex cone in the plane.

    ``WEDGE(a, b)`` spans counterclockwise from ``a`` to ``b`` with an opening
    angle strictly between 0 and pi (``cross(a, b) > 0``).  ``HALFPLANE(d)``
    denotes ``{w : cross(d, w) >= 0}``.  All direction fields are primitive.
    """

    kind: ConeKind
    a: Optional[RatVec2] = None
    b: Optional[RatVec2] = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "Cone2":
        return Cone2(ConeKind.ZERO)

    @staticmethod
    def ray(d: RatVec2) -> "Cone2":
        return Cone2(ConeKind.RAY, d.primitive())

    @staticmethod
    def line(d: RatVec2) -> "Cone2":
        d = d.primitive()
        # canonicalize: keep the representative in the upper half
        if _half_index(d) == 1:
            d = -d
        return Cone2(ConeKind.LINE, d)

    @staticmethod
    def wedge(a: RatVec2, b: RatVec2) -> "Cone2":
        a, b = a.primitive(), b.primitive()
        if a.cross(b) <= 0:
            raise ValueError("wedge requires cross(a, b) > 0 (angle in (0, pi))")
        return Cone2(ConeKind.WEDGE, a, b)

    @staticmethod
    def halfplane(boundary: RatVec2) -> "Cone2":
        return Cone2(ConeKind.HALFPLANE, boundary.primitive())

    @staticmethod
    def full() -> "Cone2":
        return Cone2(ConeKind.FULL)

    # -- queries ------------------------------------------------------------

    def generators(self) -> list[RatVec2]:
        """Finitely many directions whose cone hull reproduces this cone."""
        if self.kind is ConeKind.ZERO:
            return []
        if self.kind is ConeKind.RAY:
            return [self.a]
        if self.kind is ConeKind.LINE:
            return [self.a, -self.a]
        if self.kind is ConeKind.WEDGE:
            return [self.a, self.b]
        if self.kind is ConeKind.HALFPLANE:
            return [self.a, self.a.perp(), -self.a]
        return [vec(1, 0), vec(0, 1), vec(-1, 0), vec(0, -1)]

    def extreme_generators(self) -> list[RatVec2]:
        """Extreme directions only (boundary rays; empty for ZERO/FULL)."""
        if self.kind is ConeKind.RAY:
            return [self.a]
        if self.kind is ConeKind.LINE:
            return [self.a, -self.a]
        if self.kind is ConeKind.WEDGE:
            return [self.a, self.b]
        if self.kind is ConeKind.HALFPLANE:
            return [self.a, -self.a]
        return []

    def is_solid(self) -> bool:
        """True when the cone has nonempty interior in the plane."""
        return self.kind in (ConeKind.WEDGE, ConeKind.HALFPLANE, ConeKind.FULL)

    def interior_direction(self) -> RatVec2:
        """Some direction in the interior (solid cones only)."""
        if self.kind is ConeKind.WEDGE:
            return (self.a + self.b).primitive()
        if self.kind is ConeKind.HALFPLANE:
            return self.a.perp()
        if self.kind is ConeKind.FULL:
            return vec(1, 0)
        raise ValueError("cone has empty interior")

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.kind in (ConeKind.ZERO, ConeKind.FULL):
            return f"Cone2.{self.kind.value}"
        if self.kind is ConeKind.WEDGE:
            return f"Cone2.wedge({self.a}, {self.b})"
        return f"Cone2.{self.kind.value}({self.a})"


def cone_contains(c: Cone2, v: RatVec2, strict: bool = False) -> bool:
    """Exact membership of ``v`` in ``c`` (or its interior when ``strict``)."""
    if v.is_zero():
        # the origin belongs to every closed cone but to no interior
        return not strict
    if c.kind is ConeKind.ZERO:
        return False
    if c.kind is ConeKind.FULL:
        return True
    if c.kind is ConeKind.RAY:
        return (not strict) and c.a.cross(v) == 0 and c.a.dot(v) > 0
    if c.kind is ConeKind.LINE:
        return (not strict) and c.a.cross(v) == 0
    if c.kind is ConeKind.HALFPLANE:
        cr = c.a.cross(v)
        return cr > 0 if strict else cr >= 0
    # WEDGE
    c1 = c.a.cross(v)
    c2 = v.cross(c.b)
    if strict:
        return c1 > 0 and c2 > 0
    return c1 >= 0 and c2 >= 0


def _hull_add(c: Cone2, v: RatVec2) -> Cone2:
    """Smallest closed convex cone containing ``c`` and the direction ``v``."""
    v = v.primitive()
    if c.kind is ConeKind.FULL:
        return c
    if cone_contains(c, v):
        return c
    if c.kind is ConeKind.ZERO:
        return Cone2.ray(v)
    if c.kind is ConeKind.RAY:
        d = c.a
        cr = d.cross(v)
        if cr == 0:  # opposite direction (same direction is contained)
            return Cone2.line(d)
        if cr > 0:
            return Cone2.wedge(d, v)
        return Cone2.wedge(v, d)
    if c.kind is ConeKind.LINE:
        d = c.a
        cr = d.cross(v)
        if cr > 0:
            return Cone2.halfplane(d)
        return Cone2.halfplane(-d)
    if c.kind is ConeKind.HALFPLANE:
        return Cone2.full()
    # WEDGE(a, b), v outside
    a, b = c.a, c.b
    ca = a.cross(v)
    cb = v.cross(b)
    if ca == 0:  # v == -a
        return Cone2.halfplane(a)
    if cb == 0:  # v == -b
        return Cone2.halfplane(v)
    if ca > 0:  # v counterclockwise past b, still within pi of a
        return Cone2.wedge(a, v)
    if cb > 0:  # v clockwise before a, still within pi of b
        return Cone2.wedge(v, b)
    return Cone2.full()


def cone_from_generators(vs: Iterable[RatVec2]) -> Cone2:
    """The smallest closed convex cone containing all given vectors.

    Zero vectors are ignored; an empty input yields the zero cone.  Spans
    wider than pi canonicalize to a half-plane or the full plane.
    """
    c = Cone2.zero()
    for v in vs:
        if v.is_zero():
            continue
        c = _hull_add(c, v)
    return c


def cone_hull(cs: Iterable[Cone2]) -> Cone2:
    """The smallest Cone2 containing every input cone."""
    gens: list[RatVec2] = []
    for c in cs:
        gens.extend(c.generators())
    return cone_from_generators(gens)


def cone_negate(c: Cone2) -> Cone2:
    """The pointwise negation -c."""
    if c.kind in (ConeKind.ZERO, ConeKind.FULL):
        return c
    if c.kind is ConeKind.RAY:
        return Cone2.ray(-c.a)
    if c.kind is ConeKind.LINE:
        return Cone2.line(c.a)
    if c.kind is ConeKind.WEDGE:
        return Cone2.wedge(-c.a, -c.b)
    return Cone2.halfplane(-c.a)


def negative_dual(c: Cone2) -> Cone2:
    """The polar cone -c*, where c* = {v : v.w >= 0 for all w in c}."""
    if c.kind is ConeKind.ZERO:
        return Cone2.full()
    if c.kind is ConeKind.FULL:
        return Cone2.zero()
    if c.kind is ConeKind.RAY:
        # {v : v.d <= 0} is the half-plane to the left of perp(d)
        return Cone2.halfplane(c.a.perp())
    if c.kind is ConeKind.LINE:
        return Cone2.line(c.a.perp())
    if c.kind is ConeKind.HALFPLANE:
        # dual of {cross(d, w) >= 0} is the ray through perp(d)
        return Cone2.ray(-c.a.perp())
    # WEDGE(a, b): dual = wedge(-perp(b), perp(a)); negate it
    return Cone2.wedge(c.b.perp(), -c.a.perp())


def _strictly_between(u: RatVec2, w: RatVec2) -> Optional[RatVec2]:
    """A direction strictly inside the counterclockwise arc from u to w.

    Both inputs primitive.  Returns None for a degenerate (empty) arc.
    """
    c = u.cross(w)
    if c > 0:
        return (u + w).primitive()
    if c == 0 and u.dot(w) < 0:  # antipodal: arc of exactly pi
        return u.perp()
    return None


def open_intersection_witness(K: Cone2, B: Cone2) -> Optional[RatVec2]:
    """A nonzero vector in ``K`` intersected with the interior of ``B``.

    Returns ``None`` when the intersection is empty.  Exact: candidate
    directions are enumerated from the cones' boundary rays and arc
    midpoints, and each candidate is verified by exact sign tests; the
    candidate set provably meets every component of the intersection.
    """
    if K.kind is ConeKind.ZERO or not B.is_solid():
        return None

    def ok(v: RatVec2) -> bool:
        return cone_contains(K, v) and cone_contains(B, v, strict=True)

    candidates: list[RatVec2] = []
    pts = K.extreme_generators() + B.extreme_generators()
    if K.kind is ConeKind.FULL:
        candidates.append(B.interior_direction())
    if B.kind is ConeKind.FULL:
        gens = K.generators()
        if gens:
            candidates.append(gens[0])
    candidates.extend(pts)
    for u in pts:
        for w in pts:
            if u is w:
                continue
            m = _strictly_between(u, w)
            if m is not None:
                candidates.append(m)
        candidates.append(u.perp())
        candidates.append(-u.perp())
    for v in candidates:
        if ok(v):
            return v
    return None


# ---------------------------------------------------------------------------
# Fans and cells
# ---------------------------------------------------------------------------


class CellTag(Enum):
    ORIGIN = "origin"
    RAY = "ray"
    SECTOR = "sector"


@dataclass(frozen=True)
class Cell:
    tag: CellTag
    index: int = -1

    @staticmethod
    def origin() -> "Cell":
        return Cell(CellTag.ORIGIN)

    @staticmethod
    def ray(i: int) -> "Cell":
        return Cell(CellTag.RAY, i)

    @staticmethod
    def sector(i: int) -> "Cell":
        return Cell(CellTag.SECTOR, i)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        if self.tag is CellTag.ORIGIN:
            return "Cell.origin"
        return f"Cell.{self.tag.value}({self.index})"


@dataclass(frozen=True)
class Fan2:
    """A complete fan in the plane: primitive rays in counterclockwise order.

    Every cyclic gap between consecutive rays is at most pi, so each sector
    is a convex cone.  ``varrho`` in (0, 1) is the fattening parameter: the
    fat region of a ray is the strip of half-width ``|log varrho|`` around it
    in logarithmic coordinates.
    """

    rays: tuple[RatVec2, ...]
    varrho: Fraction
    inserted: tuple[RatVec2, ...] = field(default=())

    def __post_init__(self) -> None:
        if not (0 < self.varrho < 1):
            raise ValueError("varrho must lie in (0, 1)")
        if len(self.rays) < 2:
            raise ValueError("a complete fan needs at least 2 rays")
        n = len(self.rays)
        for i in range(n):
            u, w = self.rays[i], self.rays[(i + 1) % n]
            c = u.cross(w)
            if c < 0 or (c == 0 and u.dot(w) > 0):
                raise ValueError("sector wider than pi or duplicate ray")

    @property
    def n(self) -> int:
        return len(self.rays)

    def cells(self, include_origin: bool = True) -> list[Cell]:
        out = [Cell.origin()] if include_origin else []
        out.extend(Cell.ray(i) for i in range(self.n))
        out.extend(Cell.sector(i) for i in range(self.n))
        return out

    def sector_cone(self, i: int) -> Cone2:
        u = self.rays[i]
        w = self.rays[(i + 1) % self.n]
        if u.cross(w) == 0:  # antipodal: the sector is a half-plane
            return Cone2.halfplane(u)
        return Cone2.wedge(u, w)

    def cell_cone(self, cell: Cell) -> Cone2:
        if cell.tag is CellTag.ORIGIN:
            return Cone2.zero()
        if cell.tag is CellTag.RAY:
            return Cone2.ray(self.rays[cell.index])
        return self.sector_cone(cell.index)

    def log_halfwidth(self) -> float:
        """|log varrho|: the strip half-width in logarithmic coordinates."""
        return -math.log(float(self.varrho))


def fan_from_rays(dirs: Sequence[RatVec2], varrho: Rational) -> Fan2:
    """Build a complete fan from ray directions.

    Dedupes to primitive directions and sorts counterclockwise.  Whenever a
    cyclic gap exceeds pi, the antipode of an adjacent ray is inserted (and
    recorded) so that every sector is convex.
    """
    varrho = Fraction(varrho)
    prim: list[RatVec2] = []
    seen = set()
    for d in dirs:
        if d.is_zero():
            continue
        p = d.primitive()
        key = (p.x1, p.x2)
        if key not in seen:
            seen.add(key)
            prim.append(p)
    if not prim:
        raise ValueError("need at least one nonzero direction")
    prim.sort(key=angular_key)

    inserted: list[RatVec2] = []
    changed = True
    while changed:
        changed = False
        n = len(prim)
        for i in range(n):
            u, w = prim[i], prim[(i + 1) % n]
            c = u.cross(w)
            wide = c < 0 or (c == 0 and u.dot(w) > 0) or n == 1
            if wide:
                cand = -u
                if all(cand.cross(p) != 0 or cand.dot(p) <= 0 for p in prim):
                    prim.append(cand)
                    inserted.append(cand)
                    prim.sort(key=angular_key)
                    changed = True
                    break
    return Fan2(tuple(prim), varrho, tuple(inserted))


def convex_hull(points: Sequence[RatVec2]) -> list[RatVec2]:
    """Counterclockwise convex hull (monotone chain, exact rationals)."""
    pts = sorted(set((p.x1, p.x2) for p in points))
    pts = [RatVec2(a, b) for a, b in pts]
    if len(pts) <= 2:
        return pts

    def build(seq: list[RatVec2]) -> list[RatVec2]:
        out: list[RatVec2] = []
        for p in seq:
            while len(out) >= 2 and (out[-1] - out[-2]).cross(p - out[-2]) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(pts[::-1])
    return lower[:-1] + upper[:-1]


def normal_fan(points: Sequence[RatVec2], varrho: Rational) -> Fan2:
    """The fan of outward edge normals of the convex hull of ``points``."""
    hull = convex_hull(points)
    if len(hull) < 2:
        raise ValueError("need at least 2 distinct points")
    normals: list[RatVec2] = []
    if len(hull) == 2:
        e = hull[1] - hull[0]
        normals = [-e.perp(), e.perp()]
    else:
        m = len(hull)
        for i in range(m):
            e = hull[(i + 1) % m] - hull[i]
            normals.append(-e.perp())  # outward normal of a ccw hull edge
    return fan_from_rays(normals, varrho)


def comparison_fan(sources: Sequence[RatVec2], varrho: Rational) -> Fan2:
    """The coarsest fan on whose sector interiors the ordering of the linear
    forms ``<., s_i>`` is constant: rays are the perpendiculars of all pairwise
    source differences, in both directions."""
    distinct: list[RatVec2] = []
    seen = set()
    for s in sources:
        key = (s.x1, s.x2)
        if key not in seen:
            seen.add(key)
            distinct.append(s)
    if len(distinct) < 2:
        raise ValueError("need at least 2 distinct sources")
    rays: list[RatVec2] = []
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            d = distinct[i] - distinct[j]
            rays.append(d.perp())
            rays.append(-d.perp())
    return fan_from_rays(rays, varrho)


def refine(a: Fan2, b: Fan2, varrho: Optional[Rational] = None) -> Fan2:
    """Common refinement: the fan on the union of both ray sets."""
    if varrho is None:
        if a.varrho != b.varrho:
            raise ValueError("fans have different varrho; pass one explicitly")
        varrho = a.varrho
    return fan_from_rays(list(a.rays) + list(b.rays), varrho)


# ---------------------------------------------------------------------------
# Fattened-cell point location (float log-space, superset semantics)
# ---------------------------------------------------------------------------


def _ray_distance(X: tuple[float, float], d: RatVec2) -> float:
    """Euclidean distance from X to the ray {t*d : t >= 0}."""
    dx, dy = d.as_floats()
    nrm = math.hypot(dx, dy)
    ux, uy = dx / nrm, dy / nrm
    t = X[0] * ux + X[1] * uy
    if t <= 0:
        return math.hypot(X[0], X[1])
    return abs(ux * X[1] - uy * X[0])


def locate_cells(fan: Fan2, x: tuple[float, float], tol: float = 0.0) -> set[Cell]:
    """All cells whose fattened region contains log(x).

    ``x`` must be strictly positive componentwise.  Comparisons are inflated
    by ``tol`` symmetrically so that near region boundaries the result is a
    superset of the exact answer.
    """
    if x[0] <= 0 or x[1] <= 0:
        raise ValueError("point must be strictly positive")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    X = (math.log(x[0]), math.log(x[1]))
    return locate_cells_log(fan, X, tol)


def locate_cells_log(fan: Fan2, X: tuple[float, float], tol: float = 0.0) -> set[Cell]:
    """Same as :func:`locate_cells` but takes the log-space point directly."""
    L = fan.log_halfwidth()
    n = fan.n
    dists = [_ray_distance(X, d) for d in fan.rays]
    out: set[Cell] = set()
    near = [i for i in range(n) if dists[i] <= L + tol]
    if len(near) >= 2:
        out.add(Cell.origin())
    for i in near:
        out.add(Cell.ray(i))
    for i in range(n):
        u = fan.rays[i]
        w = fan.rays[(i + 1) % n]
        ux, uy = u.as_floats()
        wx, wy = w.as_floats()
        nu = math.hypot(ux, uy)
        nw = math.hypot(wx, wy)
        s1 = (ux * X[1] - uy * X[0]) / nu       # >= 0 means ccw of u
        s2 = (X[0] * wy - X[1] * wx) / nw       # >= 0 means cw of w
        in_sector = s1 >= -tol and s2 >= -tol
        if not in_sector:
            continue
        if dists[i] >= L - tol and dists[(i + 1) % n] >= L - tol:
            out.add(Cell.sector(i))
    return out
