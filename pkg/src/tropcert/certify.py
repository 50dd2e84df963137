"""Separation certificates for cone differential inclusions.

A cone differential inclusion is *certified* when, for every non-origin
cell, the admissible velocity cone K(N) avoids the interior of the cell's
escape-direction cone for some positive thickening, and the cone map is
face-compatible.  With the (limit cone, thickened rays) model of escape
directions this existential reduces to two exact checks:

* K(N) meets the interior of the limit cone in no nonzero vector, and
* K(N) contains no thickened axis ray (not even on its boundary);

everything outside the limit cone separates from the escape directions once
the thickening is small enough, while a thickened ray lies in the interior
of the escape cone for *every* positive thickening.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .escape import EscapeCone, escape_cone
from .geometry import (
    Cell,
    Cone2,
    RatVec2,
    cone_contains,
    open_intersection_witness,
)
from .inclusions import (
    ConeDI,
    EmbeddingReport,
    build_dominance_di,
    build_toric_di,
    check_face_condition,
    strict_embedding_check,
)
from .systems import EEGraph, VkSystem, graph_to_system, weakly_reversible
from .geometry import comparison_fan

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class CellVerdict:
    cell: Cell
    K: Cone2
    escape: EscapeCone
    separated: bool
    witness: Optional[RatVec2] = None
    witness_kind: Optional[str] = None  # "interior" | "thickened-ray"


@dataclass(frozen=True)
class FaceVerdict:
    ray_cell: Cell
    sector_cell: Cell
    included: bool
    witness: Optional[RatVec2] = None


@dataclass(frozen=True)
class Certificate:
    cells: tuple[CellVerdict, ...]
    faces: tuple[FaceVerdict, ...]
    positive: bool

    def failing_cells(self) -> list[CellVerdict]:
        return [c for c in self.cells if not c.separated]

    def failing_faces(self) -> list[FaceVerdict]:
        return [f for f in self.faces if not f.included]


def certify_te(di: ConeDI) -> Certificate:
    """Check the separation and face conditions of an inclusion exactly."""
    cell_verdicts: list[CellVerdict] = []
    for cell in di.fan.cells(include_origin=False):
        K = di.cones[cell]
        B = escape_cone(di.fan, cell)
        witness: Optional[RatVec2] = None
        kind: Optional[str] = None
        # the escape set is the union of its pieces; test each piece's interior
        for piece in B.pieces:
            witness = open_intersection_witness(K, piece)
            if witness is not None:
                kind = "interior"
                break
        if witness is None:
            for t in sorted(B.thickened, key=lambda d: (d.x1, d.x2)):
                if cone_contains(K, t):
                    witness = t
                    kind = "thickened-ray"
                    break
        cell_verdicts.append(
            CellVerdict(
                cell=cell,
                K=K,
                escape=B,
                separated=witness is None,
                witness=witness,
                witness_kind=kind,
            )
        )

    face_verdicts: list[FaceVerdict] = []
    violations = {
        (r, s): w for r, s, w in check_face_condition(di)
    }
    for ray_cell, sector_cell in di.face_pairs():
        w = violations.get((ray_cell, sector_cell))
        face_verdicts.append(
            FaceVerdict(ray_cell, sector_cell, included=w is None, witness=w)
        )

    positive = all(c.separated for c in cell_verdicts) and all(
        f.included for f in face_verdicts
    )
    return Certificate(tuple(cell_verdicts), tuple(face_verdicts), positive)


STRATEGIES = ("dominance-comparison", "dominance-normal", "toric-if-weakly-reversible")


def certify_system(
    sys: Union[VkSystem, EEGraph],
    strategy: str = "dominance-comparison",
    varrho: Rational = Fraction(1, 400),
    eta: Rational = Fraction(1, 32),
    epsilon: Rational = Fraction(1, 2),
    seed: int = 0,
    embedding_radii: tuple[float, ...] = (8.0, 16.0, 32.0),
    embedding_samples: int = 12,
) -> tuple[Certificate, EmbeddingReport, ConeDI]:
    """Build an inclusion per strategy, certify it, and check the embedding.

    The overall verdict is permanent only when the certificate is positive
    *and* the sampled strict-embedding check passes.  ``epsilon`` is used
    only when a graph is supplied (systems carry their own rate band).
    """
    graph: Optional[EEGraph] = None
    if isinstance(sys, EEGraph):
        graph = sys
        system = graph_to_system(graph, Fraction(epsilon))
    else:
        system = sys

    if strategy == "dominance-comparison":
        di = build_dominance_di(system, "comparison", varrho, eta)
    elif strategy == "dominance-normal":
        di = build_dominance_di(system, "normal", varrho, eta)
    elif strategy == "toric-if-weakly-reversible":
        if graph is None:
            raise ValueError("toric strategy requires a graph input")
        if not weakly_reversible(graph):
            raise ValueError("graph is not weakly reversible")
        fan = comparison_fan(system.sources, Fraction(varrho))
        di = build_toric_di(fan)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")

    cert = certify_te(di)
    report = strict_embedding_check(
        system, di, radii=embedding_radii, samples=embedding_samples, seed=seed
    )
    return cert, report, di


def is_permanent_verdict(cert: Certificate, report: EmbeddingReport) -> bool:
    return cert.positive and report.passed


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def _fvec(v: RatVec2) -> list:
    from .systems import format_rational

    return [format_rational(v.x1), format_rational(v.x2)]


def _pvec(value) -> RatVec2:
    from .systems import parse_rational

    return RatVec2(parse_rational(value[0]), parse_rational(value[1]))


def cone_to_document(c: Cone2) -> dict:
    doc: dict = {"kind": c.kind.value}
    if c.a is not None:
        doc["a"] = _fvec(c.a)
    if c.b is not None:
        doc["b"] = _fvec(c.b)
    return doc


def cone_from_document(doc: dict) -> Cone2:
    from .geometry import ConeKind

    kind = ConeKind(doc["kind"])
    a = _pvec(doc["a"]) if "a" in doc else None
    b = _pvec(doc["b"]) if "b" in doc else None
    return Cone2(kind, a, b)


def _cell_name(c: Cell) -> str:
    from .geometry import CellTag

    if c.tag is CellTag.ORIGIN:
        return "origin"
    return f"{c.tag.value}:{c.index}"


def _cell_from_name(name: str) -> Cell:
    if name == "origin":
        return Cell.origin()
    tag, idx = name.split(":")
    if tag == "ray":
        return Cell.ray(int(idx))
    if tag == "sector":
        return Cell.sector(int(idx))
    raise ValueError(f"unknown cell name {name!r}")


def certificate_to_document(cert: Certificate) -> dict:
    """Stable-field-order export of a certificate with exact rationals."""
    return {
        "type": "certificate",
        "positive": cert.positive,
        "cells": [
            {
                "cell": _cell_name(v.cell),
                "K": cone_to_document(v.K),
                "escape_limit": cone_to_document(v.escape.limit),
                "escape_pieces": [cone_to_document(p) for p in v.escape.pieces],
                "escape_thickened": sorted(
                    (_fvec(d) for d in v.escape.thickened), key=str
                ),
                "separated": v.separated,
                "witness": None if v.witness is None else _fvec(v.witness),
                "witness_kind": v.witness_kind,
            }
            for v in cert.cells
        ],
        "faces": [
            {
                "ray": _cell_name(f.ray_cell),
                "sector": _cell_name(f.sector_cell),
                "included": f.included,
                "witness": None if f.witness is None else _fvec(f.witness),
            }
            for f in cert.faces
        ],
    }


def certificate_from_document(doc: dict) -> Certificate:
    if doc.get("type") != "certificate":
        raise ValueError("not a certificate document")
    cells = tuple(
        CellVerdict(
            cell=_cell_from_name(c["cell"]),
            K=cone_from_document(c["K"]),
            escape=EscapeCone(
                limit=cone_from_document(c["escape_limit"]),
                thickened=frozenset(_pvec(d) for d in c["escape_thickened"]),
                pieces=tuple(cone_from_document(p) for p in c["escape_pieces"]),
            ),
            separated=c["separated"],
            witness=None if c["witness"] is None else _pvec(c["witness"]),
            witness_kind=c["witness_kind"],
        )
        for c in doc["cells"]
    )
    faces = tuple(
        FaceVerdict(
            ray_cell=_cell_from_name(f["ray"]),
            sector_cell=_cell_from_name(f["sector"]),
            included=f["included"],
            witness=None if f["witness"] is None else _pvec(f["witness"]),
        )
        for f in doc["faces"]
    )
    return Certificate(cells, faces, doc["positive"])
