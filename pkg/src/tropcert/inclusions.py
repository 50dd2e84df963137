"""Cone differential inclusions over a complete fan.

A cone differential inclusion assigns to every fattened cell of a fan a
closed convex cone of admissible velocities, with the face-compatibility
property: the cone of a lower-dimensional cell contains the cones of the
cells it borders.  Two constructions are provided:

* the *dominance* construction: on each cell, rank the system's source
  monomials by their exponent against the cell's direction; the admissible
  cone is generated by the reaction vectors of the dominant group, widened
  slightly toward any side that a sub-dominant reaction vector pulls on;
* the *toric* construction: each cell gets the negative dual (polar cone)
  of its own cone — no system needed, and the result is always certifiable.

A strict-embedding check then samples actual velocities of a system deep in
every fattened cell and measures their angular margin to the boundary of the
assigned cone; positive margins everywhere mean the system's right-hand side
lies in the interior of the inclusion throughout the sampled regions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .geometry import (
    Cell,
    CellTag,
    Cone2,
    ConeKind,
    Fan2,
    RatVec2,
    ccw_angle_floats,
    cone_contains,
    cone_from_generators,
    cone_hull,
    comparison_fan,
    negative_dual,
    normal_fan,
    vec,
)
from .systems import VkSystem, velocity

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class ConeDI:
    """A cell -> cone map over a fan, with construction provenance."""

    fan: Fan2
    cones: dict[Cell, Cone2]
    provenance: dict[Cell, dict] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for cell in self.fan.cells():
            if cell not in self.cones:
                raise ValueError(f"missing cone for {cell}")
        if self.cones[Cell.origin()].kind is not ConeKind.FULL:
            raise ValueError("the origin cell must carry the full cone")

    @property
    def varrho(self) -> Fraction:
        return self.fan.varrho

    def cone(self, cell: Cell) -> Cone2:
        return self.cones[cell]

    def face_pairs(self) -> list[tuple[Cell, Cell]]:
        """(ray cell, adjacent sector cell) pairs; the ray is the face."""
        n = self.fan.n
        out = []
        for i in range(n):
            out.append((Cell.ray(i), Cell.sector(i)))
            out.append((Cell.ray(i), Cell.sector((i - 1) % n)))
        return out


@dataclass(frozen=True)
class EmbeddingReport:
    """Sampled velocity margins of a system against an inclusion."""

    margins: dict[Cell, float]
    worst_cell: Optional[Cell]
    worst_point: Optional[tuple[float, float]]
    worst_kappas: Optional[tuple[float, ...]]
    worst_velocity: Optional[tuple[float, float]]
    passed: bool
    notes: tuple[str, ...] = ()

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else math.inf


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def build_toric_di(fan: Fan2) -> ConeDI:
    """Assign every cell the negative dual of its own cone."""
    cones: dict[Cell, Cone2] = {}
    prov: dict[Cell, dict] = {}
    for cell in fan.cells():
        cones[cell] = negative_dual(fan.cell_cone(cell))
        prov[cell] = {"construction": "toric"}
    return ConeDI(fan, cones, prov)


def _evaluation_direction(fan: Fan2, cell: Cell) -> RatVec2:
    """Rational interior evaluation direction of a non-origin cell."""
    if cell.tag is CellTag.RAY:
        return fan.rays[cell.index]
    u = fan.rays[cell.index]
    w = fan.rays[(cell.index + 1) % fan.n]
    s = u + w
    if s.is_zero():  # half-plane sector: the perpendicular is interior
        return u.perp()
    return s


def _widen_ray(
    w: RatVec2,
    lower_vectors: Sequence[RatVec2],
    eta: Fraction,
) -> tuple[Cone2, list[str]]:
    """Widen a ray cone toward each side a sub-dominant vector pulls on."""
    ccw = [d for d in lower_vectors if w.cross(d) > 0]
    cw = [d for d in lower_vectors if w.cross(d) < 0]

    def extreme(cands: list[RatVec2], side: int) -> RatVec2:
        # farthest from w on the given side (angle from w is in (0, pi))
        best = cands[0]
        for d in cands[1:]:
            c = best.cross(d)
            if (side > 0 and c > 0) or (side < 0 and c < 0):
                best = d
        return best

    def shear(d: RatVec2) -> RatVec2:
        # scale d so that the turn angle of w + eta*d is ~eta independent of
        # the magnitudes of w and d: |cross(w, scaled d)| = |w|^2
        q = w.dot(w) / abs(w.cross(d))
        return (w + d.scale(eta * q)).primitive()

    sides: list[str] = []
    hi = w
    lo = w
    if ccw:
        hi = shear(extreme(ccw, +1))
        sides.append("ccw")
    if cw:
        lo = shear(extreme(cw, -1))
        sides.append("cw")
    if not ccw and not cw:
        p = w.perp()
        hi = (w + p.scale(eta)).primitive()
        lo = (w - p.scale(eta)).primitive()
        sides = ["ccw-default", "cw-default"]
    if hi == lo:  # no widening happened (unreachable, kept defensive)
        return Cone2.ray(w), sides
    if lo == w:
        return Cone2.wedge(w, hi), sides
    if hi == w:
        return Cone2.wedge(lo, w), sides
    return Cone2.wedge(lo, hi), sides


FanChoice = Union[str, Fan2]


def build_dominance_di(
    sys: VkSystem,
    fan_choice: FanChoice = "comparison",
    varrho: Rational = Fraction(1, 400),
    eta: Rational = Fraction(1, 1024),
) -> ConeDI:
    """Dominance construction of a cone differential inclusion.

    ``fan_choice`` is ``"comparison"`` (pairwise source-difference normals),
    ``"normal"`` (normal fan of the source hull), or a custom ``Fan2``.
    On each non-origin cell the sources are ranked by the exact inner product
    of the cell's evaluation direction with the source exponent; the cone is
    generated by the dominant group's reaction vectors and, when that cone is
    a single ray, widened by the rational shear ``w -> w + eta*d`` toward each
    side a lower-ranked reaction vector pulls on.
    """
    varrho = Fraction(varrho)
    eta = Fraction(eta)
    if eta <= 0:
        raise ValueError("eta must be positive")
    if isinstance(fan_choice, Fan2):
        fan = fan_choice
    elif fan_choice == "comparison":
        fan = comparison_fan(sys.sources, varrho)
    elif fan_choice == "normal":
        fan = normal_fan(sys.sources, varrho)
    else:
        raise ValueError(f"unknown fan choice: {fan_choice!r}")

    cones: dict[Cell, Cone2] = {Cell.origin(): Cone2.full()}
    prov: dict[Cell, dict] = {Cell.origin(): {"construction": "dominance"}}

    for cell in fan.cells(include_origin=False):
        rstar = _evaluation_direction(fan, cell)
        scored = [(rstar.dot(s), s, rs) for s, rs in sys.terms]
        top = max(score for score, _, _ in scored)
        top_vectors = [v for score, _, rs in scored if score == top for v in rs]
        top_sources = [s for score, s, _ in scored if score == top]
        lower_vectors = [v for score, _, rs in scored if score < top for v in rs]
        raw = cone_from_generators(top_vectors)
        record: dict = {
            "construction": "dominance",
            "evaluation_direction": rstar.primitive(),
            "dominant_sources": top_sources,
            "raw_kind": raw.kind.value,
        }
        if raw.is_solid():
            K = raw
        elif raw.kind is ConeKind.RAY:
            K, sides = _widen_ray(raw.a, lower_vectors, eta)
            record["widened"] = sides
        else:  # LINE or ZERO: no usable direction information
            K = Cone2.full()
            record["degenerate"] = True
        cones[cell] = K
        prov[cell] = record

    # face condition: a ray cell's cone must contain both adjacent sector cones
    n = fan.n
    for i in range(n):
        ray_cell = Cell.ray(i)
        neighbors = [Cell.sector(i), Cell.sector((i - 1) % n)]
        enlarged = cone_hull([cones[ray_cell]] + [cones[s] for s in neighbors])
        if enlarged != cones[ray_cell]:
            prov[ray_cell]["face_enlarged"] = True
            cones[ray_cell] = enlarged

    return ConeDI(fan, cones, prov)


def check_face_condition(di: ConeDI) -> list[tuple[Cell, Cell, RatVec2]]:
    """Violations of face compatibility: (ray, sector, witness generator)."""
    bad = []
    for ray_cell, sector_cell in di.face_pairs():
        big = di.cones[ray_cell]
        small = di.cones[sector_cell]
        for g in small.generators():
            if not cone_contains(big, g):
                bad.append((ray_cell, sector_cell, g))
                break
    return bad


# ---------------------------------------------------------------------------
# Strict-embedding check
# ---------------------------------------------------------------------------


def angular_margin(K: Cone2, v: tuple[float, float]) -> float:
    """Signed angular distance (radians) from ``v`` to the boundary of ``K``.

    Positive inside the interior, negative outside, zero on the boundary.
    Cones with empty interior give nonpositive margins.
    """
    nv = math.hypot(v[0], v[1])
    if nv == 0:
        raise ValueError("zero velocity has no direction")
    av = math.atan2(v[1], v[0])

    def wrap(x: float) -> float:
        return (x + math.pi) % (2 * math.pi) - math.pi

    if K.kind is ConeKind.FULL:
        return math.pi
    if K.kind is ConeKind.ZERO:
        return -math.pi
    if K.kind is ConeKind.RAY:
        return -abs(wrap(av - ccw_angle_floats(K.a)))
    if K.kind is ConeKind.LINE:
        d = abs(wrap(av - ccw_angle_floats(K.a)))
        return -min(d, math.pi - d)
    if K.kind is ConeKind.HALFPLANE:
        ta = ccw_angle_floats(K.a)
        width = math.pi
    else:  # WEDGE
        ta = ccw_angle_floats(K.a)
        tb = ccw_angle_floats(K.b)
        width = (tb - ta) % (2 * math.pi)
    d1 = wrap(av - ta)
    return min(d1, width - d1)


def sample_fat_cell_logpoints(
    fan: Fan2,
    cell: Cell,
    radius: float,
    count: int,
) -> list[tuple[float, float]]:
    """Log-space points inside the fattened cell, at the given radius.

    Ray cells are sampled across their strip; sector cells across their
    trimmed angular range.  Points falling inside the interior of another
    cell's fat region (in particular the origin's, which is carved out of
    every strip) are discarded.  Returns an empty list when the radius is
    too small for the cell's fat region to exist at that distance.
    """
    from .geometry import _ray_distance

    L = fan.log_halfwidth()

    def outside_other_strips(X: tuple[float, float], own: Optional[int]) -> bool:
        for j, d in enumerate(fan.rays):
            if j == own:
                continue
            if _ray_distance(X, d) < L:
                return False
        return True

    out: list[tuple[float, float]] = []
    if cell.tag is CellTag.ORIGIN:
        for k in range(count):
            theta = 2 * math.pi * k / max(count, 1)
            rr = 0.5 * L
            out.append((rr * math.cos(theta), rr * math.sin(theta)))
        return out
    if cell.tag is CellTag.RAY:
        if radius <= 0:
            return []
        dx, dy = fan.rays[cell.index].as_floats()
        nrm = math.hypot(dx, dy)
        ux, uy = dx / nrm, dy / nrm
        nx, ny = -uy, ux
        margin = 0.98 * L
        for k in range(count):
            s = -margin + 2 * margin * (k / max(count - 1, 1))
            X = (radius * ux + s * nx, radius * uy + s * ny)
            if outside_other_strips(X, cell.index):
                out.append(X)
        return out
    # sector
    u = fan.rays[cell.index]
    w = fan.rays[(cell.index + 1) % fan.n]
    ta = ccw_angle_floats(u)
    width = ccw_angle_floats(w) - ta
    width %= 2 * math.pi
    if width == 0:
        width = math.pi
    if radius <= L:
        return []
    trim = math.asin(min(1.0, L / radius)) * 1.02
    lo, hi = ta + trim, ta + width - trim
    if hi <= lo:
        return []
    for k in range(count):
        theta = lo + (hi - lo) * (k / max(count - 1, 1))
        X = (radius * math.cos(theta), radius * math.sin(theta))
        if outside_other_strips(X, None):
            out.append(X)
    return out


def strict_embedding_check(
    sys: VkSystem,
    di: ConeDI,
    radii: Sequence[float] = (8.0, 16.0, 32.0),
    samples: int = 16,
    seed: int = 0,
) -> EmbeddingReport:
    """Sample velocities deep in every fattened cell and measure margins.

    For each cell and radius, log-points across the fat region are combined
    with rate vectors at the corners of the admissible band plus seeded
    random interior rates; the report records the per-cell minimum angular
    margin of the velocity to the boundary of the cell's cone.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    lo, hi = float(sys.epsilon), 1.0 / float(sys.epsilon)
    m = sys.n_reactions
    corner_sets: list[tuple[float, ...]]
    if m <= 10:
        corner_sets = []
        for mask in range(2**m):
            corner_sets.append(
                tuple(hi if (mask >> j) & 1 else lo for j in range(m))
            )
    else:
        rng = random.Random(seed ^ 0xC0FFEE)
        corner_sets = [
            tuple(rng.choice((lo, hi)) for _ in range(m)) for _ in range(1024)
        ]

    margins: dict[Cell, float] = {}
    notes: list[str] = []
    worst = (math.inf, None, None, None, None)

    for cell in di.fan.cells():
        K = di.cones[cell]
        cell_key = {"origin": 1, "ray": 2, "sector": 3}[cell.tag.value]
        rng = random.Random((seed << 16) ^ (cell_key * 4096 + cell.index + 1))
        kappa_sets = list(corner_sets)
        for _ in range(samples):
            kappa_sets.append(tuple(rng.uniform(lo, hi) for _ in range(m)))
        pts: list[tuple[float, float]] = []
        for radius in radii:
            pts.extend(sample_fat_cell_logpoints(di.fan, cell, radius, samples))
        if not pts:
            notes.append(f"{cell}: no sample points at given radii, skipped")
            continue
        cell_min = math.inf
        for X in pts:
            x = (math.exp(X[0]), math.exp(X[1]))
            for kappas in kappa_sets:
                f = velocity(sys, x, kappas)
                mg = angular_margin(K, f)
                if mg < cell_min:
                    cell_min = mg
                if mg < worst[0]:
                    worst = (mg, cell, x, kappas, f)
        margins[cell] = cell_min

    passed = bool(margins) and all(v > 0 for v in margins.values())
    return EmbeddingReport(
        margins=margins,
        worst_cell=worst[1],
        worst_point=worst[2],
        worst_kappas=worst[3],
        worst_velocity=worst[4],
        passed=passed,
        notes=tuple(notes),
    )
