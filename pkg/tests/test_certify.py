"""Separation certificates, strategies, and certificate documents."""

import json
from fractions import Fraction

import pytest

from tropcert.certify import (
    certificate_from_document,
    certificate_to_document,
    certify_system,
    certify_te,
    is_permanent_verdict,
)
from tropcert.escape import escape_cone
from tropcert.geometry import (
    Cell,
    cone_contains,
    fan_from_rays,
    vec,
)
from tropcert.inclusions import build_dominance_di, build_toric_di
from tropcert.systems import EEGraph, lotka_volterra_variant


def test_toric_inclusion_certifies_on_fixed_fans():
    for rays in (
        [vec(1, 0), vec(0, 1), vec(-1, 0), vec(0, -1)],
        [vec(2, 1), vec(-1, 3), vec(-1, -1), vec(1, -2), vec(3, -1)],
    ):
        fan = fan_from_rays(rays, Fraction(1, 400))
        cert = certify_te(build_toric_di(fan))
        assert cert.positive
        assert not cert.failing_cells() and not cert.failing_faces()


def test_certificate_witnesses_are_genuine():
    sysm = lotka_volterra_variant(0, 0, Fraction(1, 2))  # classical, not certified
    di = build_dominance_di(sysm, "comparison")
    cert = certify_te(di)
    assert not cert.positive
    for v in cert.failing_cells():
        assert v.witness is not None
        if v.witness_kind == "interior":
            assert cone_contains(v.K, v.witness)
            assert any(
                cone_contains(p, v.witness, strict=True) for p in v.escape.pieces
            )
        else:
            assert v.witness_kind == "thickened-ray"
            assert v.witness in escape_cone(di.fan, v.cell).thickened
            assert cone_contains(v.K, v.witness)


def test_certify_system_strategies_agree_on_mlv():
    sysm = lotka_volterra_variant(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    for strategy in ("dominance-comparison", "dominance-normal"):
        cert, rep, di = certify_system(sysm, strategy=strategy)
        assert is_permanent_verdict(cert, rep), strategy


def test_toric_strategy_requires_weakly_reversible_graph():
    sysm = lotka_volterra_variant(1, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        certify_system(sysm, strategy="toric-if-weakly-reversible")
    g = EEGraph(
        nodes=(("a", vec(1, 0)), ("b", vec(1, 1)), ("c", vec(0, 1))),
        edges=(("a", "b"), ("b", "c")),
    )
    with pytest.raises(ValueError):
        certify_system(g, strategy="toric-if-weakly-reversible")
    g2 = EEGraph(g.nodes, g.edges + (("c", "a"),))
    cert, rep, di = certify_system(g2, strategy="toric-if-weakly-reversible")
    assert cert.positive


def test_unknown_strategy_rejected():
    sysm = lotka_volterra_variant(1, 1, Fraction(1, 2))
    with pytest.raises(ValueError):
        certify_system(sysm, strategy="magic")


def test_certificate_document_round_trip():
    sysm = lotka_volterra_variant(Fraction(1, 2), 2, Fraction(1, 2))
    di = build_dominance_di(sysm, "comparison")
    cert = certify_te(di)
    doc = certificate_to_document(cert)
    again = certificate_from_document(json.loads(json.dumps(doc)))
    assert again == cert


def test_face_condition_violation_is_reported():
    from tropcert.geometry import Cone2, ConeKind
    from tropcert.inclusions import ConeDI

    fan = fan_from_rays([vec(1, 0), vec(0, 1), vec(-1, 0), vec(0, -1)],
                        Fraction(1, 400))
    di = build_toric_di(fan)
    cones = dict(di.cones)
    # shrink one ray cone so the adjacent sector cone is no longer included
    cones[Cell.ray(2)] = Cone2.ray(vec(1, 1))
    bad = ConeDI(fan, cones)
    cert = certify_te(bad)
    assert any(not f.included and f.witness is not None for f in cert.faces)
