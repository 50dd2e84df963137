"""Trajectory simulation for power-law systems with bounded varying rates.

Integration runs in log coordinates (dX/dt = f(exp X, t) / exp X,
componentwise), which keeps every state strictly positive by construction.
The integrator is classical fixed-step fourth-order Runge-Kutta for
reproducibility; a step-halving error estimate is available on demand.
Rate schedules are deterministic functions of time and a seed, always
clamped to [epsilon, 1/epsilon].
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .regions import InvariantPolygon
from .systems import VkSystem

__all__ = [
    "KappaSchedule",
    "Trajectory",
    "RegionEvent",
    "integrate",
    "step_halving_error",
    "permanence_report",
    "lv_conserved",
]


@dataclass(frozen=True)
class KappaSchedule:
    """Per-reaction rate functions kappa_i(t), clamped to [eps, 1/eps].

    kinds:
      - "constant": fixed ``values`` (default all 1, clamped);
      - "piecewise": piecewise constant, redrawn log-uniformly in
        [eps, 1/eps] on every interval of length ``period`` from a
        deterministic per-interval generator derived from ``seed``;
      - "sinusoidal": kappa_i(t) = exp(sin(2 pi f_i t + phi_i) * log(1/eps)).
    """

    kind: str
    epsilon: Fraction
    n_rates: int
    values: tuple[float, ...] = ()
    period: float = 1.0
    seed: int = 0
    frequencies: tuple[float, ...] = ()
    phases: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "piecewise", "sinusoidal"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not (0 < self.epsilon <= 1):
            raise ValueError("epsilon must lie in (0, 1]")
        if self.n_rates < 1:
            raise ValueError("need at least one rate")
        if self.kind == "piecewise" and self.period <= 0:
            raise ValueError("period must be positive")

    @classmethod
    def constant(
        cls, sys: VkSystem, values: Optional[Sequence[float]] = None
    ) -> "KappaSchedule":
        n = sys.n_reactions
        vals = tuple(float(v) for v in values) if values is not None else (1.0,) * n
        if len(vals) != n:
            raise ValueError(f"need {n} rate values, got {len(vals)}")
        return cls("constant", sys.epsilon, n, values=vals)

    @classmethod
    def piecewise(cls, sys: VkSystem, period: float, seed: int) -> "KappaSchedule":
        return cls(
            "piecewise", sys.epsilon, sys.n_reactions,
            period=float(period), seed=int(seed),
        )

    @classmethod
    def sinusoidal(
        cls,
        sys: VkSystem,
        frequencies: Optional[Sequence[float]] = None,
        phases: Optional[Sequence[float]] = None,
    ) -> "KappaSchedule":
        n = sys.n_reactions
        freqs = (
            tuple(float(f) for f in frequencies)
            if frequencies is not None
            else tuple(1.0 + 0.25 * i for i in range(n))
        )
        phs = (
            tuple(float(p) for p in phases)
            if phases is not None
            else tuple(2.0 * math.pi * i / n for i in range(n))
        )
        if len(freqs) != n or len(phs) != n:
            raise ValueError(f"need {n} frequencies and phases")
        return cls(
            "sinusoidal", sys.epsilon, n, frequencies=freqs, phases=phs
        )

    def rates(self, t: float) -> tuple[float, ...]:
        lo = float(self.epsilon)
        hi = 1.0 / lo

        def clamp(v: float) -> float:
            return min(hi, max(lo, v))

        if self.kind == "constant":
            return tuple(clamp(v) for v in self.values)
        if self.kind == "piecewise":
            k = math.floor(t / self.period)
            rng = random.Random(f"{self.seed}:{k}")
            span = math.log(hi) - math.log(lo)
            return tuple(
                clamp(math.exp(math.log(lo) + rng.random() * span))
                for _ in range(self.n_rates)
            )
        amp = math.log(hi)
        return tuple(
            clamp(math.exp(math.sin(2.0 * math.pi * f * t + p) * amp))
            for f, p in zip(self.frequencies, self.phases)
        )


@dataclass(frozen=True)
class RegionEvent:
    """A crossing of the reference polygon boundary along a trajectory."""

    kind: str  # "entry" | "exit"
    time: float
    state: tuple[float, float]
    margin: float


@dataclass(frozen=True)
class Trajectory:
    """A simulated orbit with post-burn-in extent statistics.

    ``min_margin_after_entry`` is the worst relative slack against the
    reference polygon's edge inequalities observed at any recorded state
    after the first entry (first-order equal to log-space distance near the
    boundary; positive inside).
    """

    times: tuple[float, ...]
    states: tuple[tuple[float, float], ...]
    events: tuple[RegionEvent, ...] = ()
    burn_in: float = 0.5
    min_after_burn_in: tuple[float, float] = (math.nan, math.nan)
    max_after_burn_in: tuple[float, float] = (math.nan, math.nan)
    entered_at: Optional[float] = None
    min_margin_after_entry: Optional[float] = None
    half_step_error: Optional[float] = None

    @property
    def final_state(self) -> tuple[float, float]:
        return self.states[-1]


class _RegionGeom:
    """Float view of a polygon for fast per-step inside/margin queries."""

    def __init__(self, poly: InvariantPolygon) -> None:
        self.verts = [(float(v.x1), float(v.x2)) for v in poly.vertices]
        self.logs = [(math.log(a), math.log(b)) for a, b in self.verts]

    def inside(self, x: tuple[float, float]) -> bool:
        # crossing-number test in float coordinates
        cnt = 0
        px, py = x
        vs = self.verts
        for j in range(len(vs)):
            ax, ay = vs[j - 1]
            bx, by = vs[j]
            if (ay > py) != (by > py):
                t = (py - ay) / (by - ay)
                if px < ax + t * (bx - ax):
                    cnt += 1
        return cnt % 2 == 1

    def margin(self, x: tuple[float, float]) -> float:
        if x[0] <= 0 or x[1] <= 0:
            return -math.inf
        X = (math.log(x[0]), math.log(x[1]))
        best = math.inf
        logs = self.logs
        for j in range(len(logs)):
            a, b = logs[j - 1], logs[j]
            dx, dy = b[0] - a[0], b[1] - a[1]
            px, py = X[0] - a[0], X[1] - a[1]
            den = dx * dx + dy * dy
            s = 0.0 if den == 0.0 else min(1.0, max(0.0, (px * dx + py * dy) / den))
            best = min(best, math.hypot(px - s * dx, py - s * dy))
        return best if self.inside(x) else -best


def region_margin(poly: InvariantPolygon, x: tuple[float, float]) -> float:
    """Signed log-space distance from x to the polygon boundary.

    Positive inside, negative outside.  Edges are approximated by the log
    chords between consecutive vertex logarithms (the polygon need not be
    convex, so the distance is taken to the nearest boundary segment).
    """
    return _RegionGeom(poly).margin(x)


def _deriv(
    sys: VkSystem, sched: KappaSchedule
) -> Callable[[tuple[float, float], float], tuple[float, float]]:
    # flattened float view of the terms for the integrator's inner loop
    pairs = [
        (float(s.x1), float(s.x2), float(v.x1), float(v.x2))
        for s, v in sys.reaction_list()
    ]
    exp = math.exp

    if sched.kind == "constant":
        fixed = sched.rates(0.0)

        def get_rates(t: float) -> tuple[float, ...]:
            return fixed

    elif sched.kind == "piecewise":
        period = sched.period
        cache: dict[int, tuple[float, ...]] = {}

        def get_rates(t: float) -> tuple[float, ...]:
            k = math.floor(t / period)
            r = cache.get(k)
            if r is None:
                r = sched.rates(t)
                cache[k] = r
            return r

    else:
        get_rates = sched.rates

    def safe_exp(u: float) -> float:
        try:
            return exp(u)
        except OverflowError:
            return math.inf

    def F(X: tuple[float, float], t: float) -> tuple[float, float]:
        x1, x2 = X
        rates = get_rates(t)
        out1 = out2 = 0.0
        for (s1, s2, v1, v2), k in zip(pairs, rates):
            # velocity / x, componentwise, all in log coordinates
            mono = k * safe_exp(s1 * x1 + s2 * x2)
            out1 += mono * v1
            out2 += mono * v2
        return (out1 * safe_exp(-x1), out2 * safe_exp(-x2))

    return F


def integrate(
    sys: VkSystem,
    sched: KappaSchedule,
    x0: tuple[float, float],
    t_end: float,
    h: float,
    region: Optional[InvariantPolygon] = None,
    burn_in: float = 0.5,
    error_estimate: bool = False,
) -> Trajectory:
    """Fixed-step fourth-order Runge-Kutta in log coordinates.

    Records the state at every step; when ``region`` is given, entry/exit
    events and the worst post-entry margin are tracked.  ``t_end = 0``
    returns the single-point trajectory {x0}.
    """
    if x0[0] <= 0 or x0[1] <= 0:
        raise ValueError("initial state must be strictly positive")
    if h <= 0:
        raise ValueError("step size must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")

    F = _deriv(sys, sched)
    times, states = _run(F, x0, t_end, h)

    events: list[RegionEvent] = []
    entered_at: Optional[float] = None
    min_margin: Optional[float] = None
    if region is not None:
        geom = _RegionGeom(region)
        inside = False
        for t, x in zip(times, states):
            marg = geom.margin(x)
            now_inside = marg > 0.0
            if now_inside and not inside:
                events.append(RegionEvent("entry", t, x, marg))
                if entered_at is None:
                    entered_at = t
            elif inside and not now_inside:
                events.append(RegionEvent("exit", t, x, marg))
            inside = now_inside
            if entered_at is not None:
                min_margin = marg if min_margin is None else min(min_margin, marg)

    t_cut = burn_in * t_end
    tail = [x for t, x in zip(times, states) if t >= t_cut]
    if not tail:
        tail = [states[-1]]
    mins = (min(x[0] for x in tail), min(x[1] for x in tail))
    maxs = (max(x[0] for x in tail), max(x[1] for x in tail))

    err: Optional[float] = None
    if error_estimate and t_end > 0:
        _, states_half = _run(F, x0, t_end, h / 2.0)
        a, b = states[-1], states_half[-1]
        err = math.hypot(
            math.log(a[0]) - math.log(b[0]), math.log(a[1]) - math.log(b[1])
        )

    return Trajectory(
        times=tuple(times),
        states=tuple(states),
        events=tuple(events),
        burn_in=burn_in,
        min_after_burn_in=mins,
        max_after_burn_in=maxs,
        entered_at=entered_at,
        min_margin_after_entry=min_margin,
        half_step_error=err,
    )


def _run(
    F: Callable[[tuple[float, float], float], tuple[float, float]],
    x0: tuple[float, float],
    t_end: float,
    h: float,
) -> tuple[list[float], list[tuple[float, float]]]:
    X = (math.log(x0[0]), math.log(x0[1]))
    t = 0.0
    times = [0.0]
    states = [(float(x0[0]), float(x0[1]))]
    n_steps = int(math.ceil(t_end / h - 1e-12)) if t_end > 0 else 0
    for k in range(n_steps):
        step = min(h, t_end - t)
        k1 = F(X, t)
        k2 = F((X[0] + 0.5 * step * k1[0], X[1] + 0.5 * step * k1[1]), t + 0.5 * step)
        k3 = F((X[0] + 0.5 * step * k2[0], X[1] + 0.5 * step * k2[1]), t + 0.5 * step)
        k4 = F((X[0] + step * k3[0], X[1] + step * k3[1]), t + step)
        X = (
            X[0] + step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            X[1] + step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        )
        t = t_end if k == n_steps - 1 else t + step
        if not (math.isfinite(X[0]) and math.isfinite(X[1])):
            raise ArithmeticError(
                f"state became nonfinite at t = {t}; last good state "
                f"{states[-1]} at t = {times[-1]}"
            )
        times.append(t)
        states.append((math.exp(X[0]), math.exp(X[1])))
    return times, states


def step_halving_error(
    sys: VkSystem,
    sched: KappaSchedule,
    x0: tuple[float, float],
    t_end: float,
    h: float,
) -> float:
    """Log-space distance between final states at steps h and h/2."""
    traj = integrate(sys, sched, x0, t_end, h, error_estimate=True)
    assert traj.half_step_error is not None
    return traj.half_step_error


def lv_conserved(x: tuple[float, float]) -> float:
    """x + y - log x - log y: constant along the classical predator-prey
    flow with unit rates, used as the integrator's order gauge."""
    return x[0] + x[1] - math.log(x[0]) - math.log(x[1])


@dataclass(frozen=True)
class PermanenceReport:
    n_trajectories: int
    n_entered: int
    entry_times: tuple[float, ...]
    n_exits_after_entry: int
    worst_margin_after_entry: Optional[float]
    overall_min: tuple[float, float]
    overall_max: tuple[float, float]
    amplitudes: tuple[float, ...]  # per run: max(max/min per coordinate)

    @property
    def invariance_ok(self) -> bool:
        return self.n_exits_after_entry == 0


def permanence_report(
    trajectories: Sequence[Trajectory],
    region: Optional[InvariantPolygon] = None,
) -> PermanenceReport:
    """Aggregate post-burn-in extents and region entry/exit statistics."""
    if not trajectories:
        raise ValueError("need at least one trajectory")
    n_entered = sum(1 for tr in trajectories if tr.entered_at is not None)
    entry_times = tuple(
        tr.entered_at for tr in trajectories if tr.entered_at is not None
    )
    n_exits = sum(
        1
        for tr in trajectories
        if tr.entered_at is not None
        for ev in tr.events
        if ev.kind == "exit" and ev.time > tr.entered_at
    )
    margins = [
        tr.min_margin_after_entry
        for tr in trajectories
        if tr.min_margin_after_entry is not None
    ]
    worst = min(margins) if margins else None
    overall_min = (
        min(tr.min_after_burn_in[0] for tr in trajectories),
        min(tr.min_after_burn_in[1] for tr in trajectories),
    )
    overall_max = (
        max(tr.max_after_burn_in[0] for tr in trajectories),
        max(tr.max_after_burn_in[1] for tr in trajectories),
    )
    amps = tuple(
        max(
            tr.max_after_burn_in[0] / tr.min_after_burn_in[0],
            tr.max_after_burn_in[1] / tr.min_after_burn_in[1],
        )
        for tr in trajectories
    )
    return PermanenceReport(
        n_trajectories=len(trajectories),
        n_entered=n_entered,
        entry_times=entry_times,
        n_exits_after_entry=n_exits,
        worst_margin_after_entry=worst,
        overall_min=overall_min,
        overall_max=overall_max,
        amplitudes=amps,
    )


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def _f17(x: Optional[float]) -> Optional[str]:
    return None if x is None else format(x, ".17g")


def trajectory_to_document(traj: Trajectory) -> dict:
    """Structured export; floats rendered with 17 significant digits."""
    return {
        "type": "trajectory",
        "burn_in": _f17(traj.burn_in),
        "times": [_f17(t) for t in traj.times],
        "states": [[_f17(a), _f17(b)] for a, b in traj.states],
        "events": [
            {
                "kind": ev.kind,
                "time": _f17(ev.time),
                "state": [_f17(ev.state[0]), _f17(ev.state[1])],
                "margin": _f17(ev.margin),
            }
            for ev in traj.events
        ],
        "min_after_burn_in": [_f17(v) for v in traj.min_after_burn_in],
        "max_after_burn_in": [_f17(v) for v in traj.max_after_burn_in],
        "entered_at": _f17(traj.entered_at),
        "min_margin_after_entry": _f17(traj.min_margin_after_entry),
        "half_step_error": _f17(traj.half_step_error),
    }


def trajectory_from_document(doc: dict) -> Trajectory:
    if doc.get("type") != "trajectory":
        raise ValueError("not a trajectory document")

    def opt(v: Optional[str]) -> Optional[float]:
        return None if v is None else float(v)

    return Trajectory(
        times=tuple(float(t) for t in doc["times"]),
        states=tuple((float(a), float(b)) for a, b in doc["states"]),
        events=tuple(
            RegionEvent(
                kind=e["kind"],
                time=float(e["time"]),
                state=(float(e["state"][0]), float(e["state"][1])),
                margin=float(e["margin"]),
            )
            for e in doc["events"]
        ),
        burn_in=float(doc["burn_in"]),
        min_after_burn_in=tuple(float(v) for v in doc["min_after_burn_in"]),
        max_after_burn_in=tuple(float(v) for v in doc["max_after_burn_in"]),
        entered_at=opt(doc["entered_at"]),
        min_margin_after_entry=opt(doc["min_margin_after_entry"]),
        half_step_error=opt(doc["half_step_error"]),
    )
