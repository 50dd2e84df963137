"""Command-line interface.

Subcommands
-----------
certify   read a system/graph document, build a cone differential inclusion,
          check separation + faces exactly and the embedding numerically;
          exit 0 when the permanence verdict holds, 2 with a witness when not.
region    construct and exactly verify a forward-invariant polygon (or a
          nested family of them) for a certified system.
simulate  stress-test the verdict with randomized bounded rate schedules.
escape    print the escape-direction table of the chosen fan.
plot      render a previously emitted document (polygon, trajectory,
          certificate, or system) as a deterministic SVG.

Exit codes: 0 = certified / success, 2 = not certified (a witness is
emitted) or region construction failure, 1 = usage or I/O error.
Rationals are written ``p/q``; floats carry 17 significant digits; SVG
output is deterministic byte for byte for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Optional, Sequence, Union

from .certify import (
    Certificate,
    certificate_to_document,
    certify_te,
    cone_to_document,
    is_permanent_verdict,
)
from .escape import escape_cone
from .geometry import Cell, CellTag, Cone2, ConeKind, Fan2, RatVec2, fan_from_rays
from .inclusions import ConeDI, build_dominance_di, strict_embedding_check
from .regions import (
    InvariantPolygon,
    RegionError,
    assign_scaffolds,
    construct_region,
    polygon_from_document,
    polygon_to_document,
)
from .simulate import (
    KappaSchedule,
    Trajectory,
    integrate,
    permanence_report,
    trajectory_from_document,
    trajectory_to_document,
)
from .systems import (
    DocumentError,
    EEGraph,
    VkSystem,
    format_rational,
    graph_to_system,
    parse_rational,
    parse_system,
)


class CliError(Exception):
    """Carries the process exit code alongside the message."""

    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Everything a run depends on, for reproducible re-execution."""

    command: str
    input: Optional[str] = None
    varrho: Fraction = Fraction(1, 400)
    eta: Fraction = Fraction(1, 32)
    epsilon: Fraction = Fraction(1, 2)
    fan: str = "comparison"
    runs: int = 20
    seed: int = 0
    t_end: float = 40.0
    step: float = 0.01
    t_hat: float = 30.0
    family: int = 1
    out: str = "."
    svg: bool = False


def _f17(x: float) -> str:
    return format(float(x), ".17g")


def config_to_document(cfg: RunConfig) -> dict:
    return {
        "type": "config",
        "command": cfg.command,
        "input": cfg.input,
        "varrho": format_rational(cfg.varrho),
        "eta": format_rational(cfg.eta),
        "epsilon": format_rational(cfg.epsilon),
        "fan": cfg.fan,
        "runs": cfg.runs,
        "seed": cfg.seed,
        "t_end": _f17(cfg.t_end),
        "step": _f17(cfg.step),
        "t_hat": _f17(cfg.t_hat),
        "family": cfg.family,
        "out": cfg.out,
        "svg": cfg.svg,
    }


def config_from_document(doc: dict) -> RunConfig:
    if doc.get("type") != "config":
        raise DocumentError("'type' must be 'config'")
    return RunConfig(
        command=doc["command"],
        input=doc.get("input"),
        varrho=parse_rational(doc["varrho"]),
        eta=parse_rational(doc["eta"]),
        epsilon=parse_rational(doc["epsilon"]),
        fan=doc["fan"],
        runs=int(doc["runs"]),
        seed=int(doc["seed"]),
        t_end=float(doc["t_end"]),
        step=float(doc["step"]),
        t_hat=float(doc["t_hat"]),
        family=int(doc["family"]),
        out=doc["out"],
        svg=bool(doc["svg"]),
    )


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise CliError(1, f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise CliError(1, f"invalid JSON in {path}: {e}") from e


def _write_json(path: str, doc: dict) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=False)
            fh.write("\n")
    except OSError as e:
        raise CliError(1, f"cannot write {path}: {e}") from e


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise CliError(1, f"cannot write {path}: {e}") from e


def _load_model(path: str) -> Union[VkSystem, EEGraph]:
    doc = _read_json(path)
    try:
        return parse_system(doc)
    except DocumentError as e:
        raise CliError(1, f"{path}: {e}") from e


def _ensure_out(cfg: RunConfig) -> str:
    try:
        os.makedirs(cfg.out, exist_ok=True)
    except OSError as e:
        raise CliError(1, f"cannot create output directory {cfg.out}: {e}") from e
    return cfg.out


def _parse_fan_document(doc: dict, varrho: Fraction) -> Fan2:
    if doc.get("type") != "fan":
        raise DocumentError("'type' must be 'fan'")
    rays_doc = doc.get("rays")
    if not isinstance(rays_doc, list) or len(rays_doc) < 2:
        raise DocumentError("'rays' must be a list of at least two 2-vectors")
    dirs = [RatVec2(parse_rational(r[0]), parse_rational(r[1])) for r in rays_doc]
    if "varrho" in doc:
        varrho = parse_rational(doc["varrho"])
    return fan_from_rays(dirs, varrho)


def _build_inclusion(
    cfg: RunConfig, model: Union[VkSystem, EEGraph]
) -> tuple[VkSystem, ConeDI]:
    system = (
        graph_to_system(model, cfg.epsilon) if isinstance(model, EEGraph) else model
    )
    if cfg.fan in ("comparison", "normal"):
        fan_choice: Union[str, Fan2] = cfg.fan
    elif cfg.fan.startswith("custom:"):
        path = cfg.fan[len("custom:"):]
        try:
            fan_choice = _parse_fan_document(_read_json(path), cfg.varrho)
        except (DocumentError, ValueError) as e:
            raise CliError(1, f"bad fan document {path}: {e}") from e
    else:
        raise CliError(
            1, f"--fan must be comparison, normal, or custom:<path>; got {cfg.fan!r}"
        )
    try:
        di = build_dominance_di(system, fan_choice, cfg.varrho, cfg.eta)
    except ValueError as e:
        raise CliError(1, f"cannot build the inclusion: {e}") from e
    return system, di


def _first_witness(cert: Certificate) -> Optional[dict]:
    for v in cert.cells:
        if not v.separated:
            return {
                "kind": f"cell-{v.witness_kind}",
                "cell": _cell_label(v.cell),
                "witness": [format_rational(v.witness.x1), format_rational(v.witness.x2)],
            }
    for f in cert.faces:
        if not f.included:
            return {
                "kind": "face",
                "ray": _cell_label(f.ray_cell),
                "sector": _cell_label(f.sector_cell),
                "witness": [format_rational(f.witness.x1), format_rational(f.witness.x2)],
            }
    return None


def _cell_label(c: Cell) -> str:
    if c.tag is CellTag.ORIGIN:
        return "origin"
    return f"{c.tag.value}:{c.index}"


# ---------------------------------------------------------------------------
# SVG rendering (deterministic, hand-rolled)
# ---------------------------------------------------------------------------

_W = 640
_H = 640
_PAD = 48
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _n4(x: float) -> str:
    s = format(x, ".4f")
    return "0.0000" if s == "-0.0000" else s


class _Canvas:
    """Maps a rectangle in data coordinates onto a fixed pixel frame."""

    def __init__(self, xlo, xhi, ylo, yhi):
        spanx = max(xhi - xlo, 1e-9)
        spany = max(yhi - ylo, 1e-9)
        span = max(spanx, spany)
        cx, cy = (xlo + xhi) / 2.0, (ylo + yhi) / 2.0
        self.xlo, self.xhi = cx - span / 2.0, cx + span / 2.0
        self.ylo, self.yhi = cy - span / 2.0, cy + span / 2.0
        self.elements: list[str] = []

    def px(self, x: float, y: float) -> tuple[float, float]:
        sx = _PAD + (x - self.xlo) / (self.xhi - self.xlo) * (_W - 2 * _PAD)
        sy = _H - _PAD - (y - self.ylo) / (self.yhi - self.ylo) * (_H - 2 * _PAD)
        return sx, sy

    def polyline(self, pts, stroke, width=1.5, dash=None, close=False, fill="none"):
        coords = " ".join(
            f"{_n4(sx)},{_n4(sy)}" for sx, sy in (self.px(x, y) for x, y in pts)
        )
        tag = "polygon" if close else "polyline"
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.elements.append(
            f'<{tag} points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{width}"{d}/>'
        )

    def text(self, x: float, y: float, s: str, size=12, color="#333333"):
        sx, sy = self.px(x, y)
        self.elements.append(
            f'<text x="{_n4(sx)}" y="{_n4(sy)}" font-size="{size}" '
            f'font-family="monospace" fill="{color}">{s}</text>'
        )

    def label(self, s: str) -> None:
        self.elements.append(
            f'<text x="{_PAD}" y="24" font-size="13" font-family="monospace" '
            f'fill="#000000">{s}</text>'
        )

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">\n'
            f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def _log_vertices(poly: InvariantPolygon) -> list[tuple[float, float]]:
    return [
        (math.log(float(p.x1)), math.log(float(p.x2))) for p in poly.vertices
    ]


def _scaffold_lines(di: ConeDI) -> list[tuple[float, float, float, float]]:
    """One log-space line (anchor + direction) per scaffold curve."""
    out = []
    for curves in assign_scaffolds(di).values():
        for c in curves:
            out.append(
                (
                    math.log(float(c.a1)),
                    math.log(float(c.a2)),
                    float(c.m1),
                    float(c.m2),
                )
            )
    return out


def _region_svg(
    polys: Sequence[InvariantPolygon], di: Optional[ConeDI], title: str
) -> str:
    all_pts = [p for poly in polys for p in _log_vertices(poly)]
    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    pad = 0.08 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    cv = _Canvas(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)
    if di is not None:
        span = 4.0 * max(
            cv.xhi - cv.xlo, cv.yhi - cv.ylo
        )
        for ax, ay, mx, my in _scaffold_lines(di):
            n = math.hypot(mx, my)
            ux, uy = mx / n, my / n
            cv.polyline(
                [(ax - span * ux, ay - span * uy), (ax + span * ux, ay + span * uy)],
                stroke="#bbbbbb",
                width=0.8,
                dash="4 4",
            )
    for k, poly in enumerate(polys):
        cv.polyline(
            _log_vertices(poly),
            stroke=_PALETTE[k % len(_PALETTE)],
            width=1.8,
            close=True,
        )
    cv.text(0.0, 0.0, "+", size=14, color="#000000")
    cv.label(title)
    return cv.render()


def _phase_svg(trajectories: Sequence[Trajectory], title: str) -> str:
    pts = [
        (math.log(x[0]), math.log(x[1]))
        for tr in trajectories
        for x in tr.states
        if x[0] > 0 and x[1] > 0 and math.isfinite(x[0]) and math.isfinite(x[1])
    ]
    if not pts:
        raise CliError(1, "nothing to plot: no positive finite states")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    pad = 0.08 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    cv = _Canvas(min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)
    for k, tr in enumerate(trajectories):
        line = [
            (math.log(x[0]), math.log(x[1]))
            for x in tr.states
            if x[0] > 0 and x[1] > 0 and math.isfinite(x[0]) and math.isfinite(x[1])
        ]
        cv.polyline(line, stroke=_PALETTE[k % len(_PALETTE)], width=1.0)
    cv.label(title)
    return cv.render()


def _cone_arms(c: Cone2) -> list[tuple[float, float]]:
    """Unit float directions spanning the cone, for drawing."""
    if c.kind is ConeKind.ZERO:
        return []
    gens = c.generators() if c.kind is ConeKind.FULL else c.extreme_generators()
    out = []
    for g in gens:
        gx, gy = float(g.x1), float(g.x2)
        n = math.hypot(gx, gy)
        out.append((gx / n, gy / n))
    return out


def _fan_svg(di: ConeDI, cert: Optional[Certificate], title: str) -> str:
    cv = _Canvas(-2.2, 2.2, -2.2, 2.2)
    for r in di.fan.rays:
        rx, ry = float(r.x1), float(r.x2)
        n = math.hypot(rx, ry)
        cv.polyline([(0.0, 0.0), (2.0 * rx / n, 2.0 * ry / n)], "#888888", width=1.0)
    verdicts = {v.cell: v for v in cert.cells} if cert is not None else {}
    for cell in di.fan.cells(include_origin=False):
        cone = di.fan.cell_cone(cell)
        rep = cone.a if cell.tag is CellTag.RAY else cone.interior_direction()
        px, py = float(rep.x1), float(rep.x2)
        n = math.hypot(px, py)
        px, py = 1.3 * px / n, 1.3 * py / n
        K = di.cones[cell]
        for ux, uy in _cone_arms(K):
            cv.polyline([(px, py), (px + 0.35 * ux, py + 0.35 * uy)], "#1f77b4", 1.4)
        B = escape_cone(di.fan, cell)
        for ux, uy in _cone_arms(B.limit):
            cv.polyline(
                [(px, py), (px + 0.3 * ux, py + 0.3 * uy)], "#d62728", 1.0, dash="3 2"
            )
        v = verdicts.get(cell)
        if v is not None and not v.separated:
            cv.text(px, py, "x", size=14, color="#d62728")
    cv.label(title)
    return cv.render()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_certify(cfg: RunConfig) -> int:
    model = _load_model(cfg.input)
    system, di = _build_inclusion(cfg, model)
    cert = certify_te(di)
    embed = strict_embedding_check(
        system, di, radii=(8.0, 16.0, 32.0), samples=12, seed=cfg.seed
    )
    out = _ensure_out(cfg)
    doc = certificate_to_document(cert)
    doc["embedding"] = {
        "passed": embed.passed,
        "min_margin": _f17(embed.min_margin),
        "notes": list(embed.notes),
    }
    witness = _first_witness(cert)
    if witness is not None:
        doc["first_witness"] = witness
    _write_json(os.path.join(out, "certificate.json"), doc)
    _write_json(os.path.join(out, "config.json"), config_to_document(cfg))
    if cfg.svg:
        _write_text(
            os.path.join(out, "certificate.svg"),
            _fan_svg(di, cert, f"fan={cfg.fan} rays={di.fan.n}"),
        )
    permanent = is_permanent_verdict(cert, embed)
    print(f"separation certificate: {'positive' if cert.positive else 'negative'}")
    print(
        "embedding check: "
        f"{'passed' if embed.passed else 'failed'} "
        f"(min angular margin {embed.min_margin:.6g})"
    )
    print(f"verdict: {'permanent' if permanent else 'not certified'}")
    if not permanent and witness is not None:
        print(f"witness: {json.dumps(witness)}")
    return 0 if permanent else 2


def _cmd_region(cfg: RunConfig) -> int:
    model = _load_model(cfg.input)
    _, di = _build_inclusion(cfg, model)
    out = _ensure_out(cfg)
    _write_json(os.path.join(out, "config.json"), config_to_document(cfg))
    polys: list[InvariantPolygon] = []
    try:
        for k in range(max(cfg.family, 1)):
            poly, report = construct_region(di, cfg.t_hat * (2.0 ** k))
            polys.append(poly)
            name = "region.json" if cfg.family <= 1 else f"region_{k}.json"
            _write_json(os.path.join(out, name), polygon_to_document(poly))
            print(
                f"region t_hat={poly.t_hat:g}: verified "
                f"({len(poly.vertices)} vertices, {len(report.checks)} edge checks)"
            )
    except RegionError as e:
        print(f"region construction failed: {e}", file=sys.stderr)
        return 2
    if cfg.svg:
        _write_text(
            os.path.join(out, "region.svg"),
            _region_svg(polys, di, f"invariant region(s), t_hat={cfg.t_hat:g}"),
        )
    return 0


def _cmd_simulate(cfg: RunConfig) -> int:
    if cfg.runs <= 0:
        raise CliError(1, "--runs must be a positive integer")
    model = _load_model(cfg.input)
    system, di = _build_inclusion(cfg, model)
    cert = certify_te(di)
    region: Optional[InvariantPolygon] = None
    note = ""
    if cert.positive:
        try:
            region, _ = construct_region(di, cfg.t_hat)
        except RegionError as e:
            note = f"no region available: {e}"
    else:
        note = "inclusion not certified; simulating without a region"
    out = _ensure_out(cfg)
    _write_json(os.path.join(out, "config.json"), config_to_document(cfg))
    rng = random.Random(f"x0:{cfg.seed}")
    trajectories: list[Trajectory] = []
    for i in range(cfg.runs):
        x0 = (10.0 ** rng.uniform(-1, 1), 10.0 ** rng.uniform(-1, 1))
        sched = KappaSchedule.piecewise(system, period=1.0, seed=cfg.seed + i)
        try:
            tr = integrate(system, sched, x0, cfg.t_end, cfg.step, region=region)
        except ArithmeticError as e:
            raise CliError(1, f"run {i} diverged: {e}") from e
        trajectories.append(tr)
        _write_json(
            os.path.join(out, f"trajectory_{i}.json"), trajectory_to_document(tr)
        )
    rep = permanence_report(trajectories, region)
    rep_doc = {
        "type": "permanence-report",
        "n_trajectories": rep.n_trajectories,
        "n_entered": rep.n_entered,
        "n_exits_after_entry": rep.n_exits_after_entry,
        "worst_margin_after_entry": (
            None
            if rep.worst_margin_after_entry is None
            else _f17(rep.worst_margin_after_entry)
        ),
        "overall_min": [_f17(v) for v in rep.overall_min],
        "overall_max": [_f17(v) for v in rep.overall_max],
        "note": note,
    }
    _write_json(os.path.join(out, "report.json"), rep_doc)
    if cfg.svg:
        _write_text(
            os.path.join(out, "simulate.svg"),
            _phase_svg(trajectories, f"{cfg.runs} runs, t_end={cfg.t_end:g}"),
        )
    print(f"runs: {rep.n_trajectories}")
    if region is not None:
        print(f"entered region: {rep.n_entered}/{rep.n_trajectories}")
        print(f"exits after entry: {rep.n_exits_after_entry}")
        if rep.worst_margin_after_entry is not None:
            print(f"worst post-entry margin: {rep.worst_margin_after_entry:.6g}")
    if note:
        print(note)
    print(
        "post-burn-in extent: "
        f"[{rep.overall_min[0]:.6g}, {rep.overall_max[0]:.6g}] x "
        f"[{rep.overall_min[1]:.6g}, {rep.overall_max[1]:.6g}]"
    )
    return 0


def _cmd_escape(cfg: RunConfig) -> int:
    model = _load_model(cfg.input)
    _, di = _build_inclusion(cfg, model)
    out = _ensure_out(cfg)
    rows = []
    for cell in di.fan.cells(include_origin=False):
        B = escape_cone(di.fan, cell)
        rows.append(
            {
                "cell": _cell_label(cell),
                "limit": cone_to_document(B.limit),
                "pieces": [cone_to_document(p) for p in B.pieces],
                "thickened": sorted(
                    (
                        [format_rational(d.x1), format_rational(d.x2)]
                        for d in B.thickened
                    ),
                    key=str,
                ),
            }
        )
        thick = ", ".join(
            f"({d.x1},{d.x2})" for d in sorted(B.thickened, key=lambda v: str(v))
        )
        print(
            f"{_cell_label(cell):>10}  limit={B.limit.kind.value:<9} "
            f"pieces={len(B.pieces)}  thickened=[{thick}]"
        )
    doc = {
        "type": "escape-table",
        "rays": [
            [format_rational(r.x1), format_rational(r.x2)] for r in di.fan.rays
        ],
        "varrho": format_rational(di.fan.varrho),
        "cells": rows,
    }
    _write_json(os.path.join(out, "escape.json"), doc)
    _write_json(os.path.join(out, "config.json"), config_to_document(cfg))
    if cfg.svg:
        _write_text(
            os.path.join(out, "escape.svg"),
            _fan_svg(di, None, f"escape directions, fan={cfg.fan}"),
        )
    return 0


def _cmd_plot(cfg: RunConfig) -> int:
    doc = _read_json(cfg.input)
    out = _ensure_out(cfg)
    kind = doc.get("type")
    stem = os.path.splitext(os.path.basename(cfg.input))[0]
    target = os.path.join(out, f"{stem}.svg")
    if kind == "polygon":
        poly = polygon_from_document(doc)
        _write_text(target, _region_svg([poly], None, f"region t_hat={poly.t_hat:g}"))
    elif kind == "trajectory":
        tr = trajectory_from_document(doc)
        _write_text(target, _phase_svg([tr], "trajectory"))
    elif kind in ("system", "graph"):
        model = parse_system(doc)
        _, di = _build_inclusion(cfg, model)
        _write_text(target, _fan_svg(di, certify_te(di), f"fan={cfg.fan}"))
    else:
        raise CliError(1, f"cannot plot a {kind!r} document")
    print(f"wrote {target}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors exit 1, not argparse's 2
        raise CliError(1, message)


def _rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from e
    return q


def _build_parser() -> _Parser:
    p = _Parser(prog="tropcert", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, runs_default=20):
        sp.add_argument("input", help="input JSON document")
        sp.add_argument("--varrho", type=_rational, default=Fraction(1, 400))
        sp.add_argument("--eta", type=_rational, default=Fraction(1, 32))
        sp.add_argument(
            "--epsilon",
            type=_rational,
            default=Fraction(1, 2),
            help="rate band for graph inputs (systems carry their own)",
        )
        sp.add_argument(
            "--fan",
            default="comparison",
            help="comparison | normal | custom:<path to a fan document>",
        )
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--svg", action="store_true", help="also render an SVG")
        return sp

    common(sub.add_parser("certify", help="certify permanence"))
    sp = common(sub.add_parser("region", help="build a verified invariant polygon"))
    sp.add_argument("--t-hat", type=float, default=30.0, dest="t_hat")
    sp.add_argument(
        "--family", type=int, default=1, help="build N nested regions (t_hat * 2^k)"
    )
    sp = common(sub.add_parser("simulate", help="randomized stress test"))
    sp.add_argument("--runs", type=int, default=20)
    sp.add_argument("--t-end", type=float, default=40.0, dest="t_end")
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--t-hat", type=float, default=30.0, dest="t_hat")
    common(sub.add_parser("escape", help="escape-direction table of the fan"))
    common(sub.add_parser("plot", help="render an emitted document as SVG"))
    return p


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    base = RunConfig(command=ns.command, input=ns.input)
    known = {f.name for f in fields(RunConfig)}
    updates = {k: v for k, v in vars(ns).items() if k in known and v is not None}
    return replace(base, **updates)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        cfg = _config_from_args(ns)
        handler = {
            "certify": _cmd_certify,
            "region": _cmd_region,
            "simulate": _cmd_simulate,
            "escape": _cmd_escape,
            "plot": _cmd_plot,
        }[cfg.command]
        return handler(cfg)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except DocumentError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
