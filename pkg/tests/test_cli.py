"""Exit codes, document outputs, and deterministic SVG of the CLI."""

import json
import os

from fractions import Fraction

from tropcert.cli import RunConfig, config_from_document, config_to_document, main
from tropcert.regions import polygon_from_document
from tropcert.simulate import trajectory_from_document

INPUTS = os.path.join(os.path.dirname(__file__), os.pardir, "inputs")


def _inp(name):
    return os.path.join(INPUTS, name)


def test_certify_exit_codes(tmp_path, capsys):
    assert main(["certify", _inp("mLV_half.json"), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "verdict: permanent" in out

    assert main(["certify", _inp("classical_LV.json"), "--out", str(tmp_path)]) == 2
    out = capsys.readouterr().out
    assert "verdict: not certified" in out
    assert "witness:" in out
    doc = json.loads((tmp_path / "certificate.json").read_text())
    assert doc["positive"] is False and doc["first_witness"] is not None


def test_missing_file_and_bad_usage_exit_1(tmp_path, capsys):
    assert main(["certify", _inp("does_not_exist.json")]) == 1
    assert main(["simulate", _inp("mLV_half.json"), "--runs", "0",
                 "--out", str(tmp_path)]) == 1
    assert main(["frobnicate", _inp("mLV_half.json")]) == 1
    assert main(["certify", _inp("mLV_half.json"), "--fan", "bogus",
                 "--out", str(tmp_path)]) == 1
    capsys.readouterr()


def test_region_command_emits_parseable_polygon(tmp_path, capsys):
    assert main(["region", _inp("mLV_half.json"), "--t-hat", "30",
                 "--out", str(tmp_path), "--svg"]) == 0
    poly = polygon_from_document(json.loads((tmp_path / "region.json").read_text()))
    assert poly.t_hat == 30.0
    assert (tmp_path / "region.svg").exists()
    capsys.readouterr()


def test_region_family_renders_nested_boundaries(tmp_path, capsys):
    assert main(["region", _inp("mLV_half.json"), "--family", "2",
                 "--out", str(tmp_path), "--svg"]) == 0
    assert (tmp_path / "region_0.json").exists()
    assert (tmp_path / "region_1.json").exists()
    svg = (tmp_path / "region.svg").read_text()
    assert svg.count("<polygon") == 2
    capsys.readouterr()


def test_region_not_certified_exit_2(tmp_path, capsys):
    assert main(["region", _inp("classical_LV.json"), "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_simulate_writes_trajectories_and_report(tmp_path, capsys):
    assert main(["simulate", _inp("mLV_half.json"), "--runs", "2",
                 "--t-end", "5", "--step", "0.02", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["n_trajectories"] == 2
    tr = trajectory_from_document(
        json.loads((tmp_path / "trajectory_0.json").read_text())
    )
    assert len(tr.states) > 100
    capsys.readouterr()


def test_escape_table_and_custom_fan(tmp_path, capsys):
    assert main(["escape", _inp("rrobsys.json"), "--fan", "normal",
                 "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "escape.json").read_text())
    assert doc["rays"] == [[0, 1], [-1, 1], [-1, -1], [2, -1]]
    capsys.readouterr()
    assert main(["certify", _inp("mLV_half.json"),
                 "--fan", f"custom:{_inp('hexagon_fan.json')}",
                 "--out", str(tmp_path)]) == 0
    capsys.readouterr()


def test_svg_output_is_byte_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["certify", _inp("mLV_half.json"), "--svg",
                     "--out", str(d)]) == 0
    assert (a / "certificate.svg").read_bytes() == (b / "certificate.svg").read_bytes()
    capsys.readouterr()


def test_plot_round_trips_emitted_documents(tmp_path, capsys):
    assert main(["region", _inp("mLV_half.json"), "--out", str(tmp_path)]) == 0
    assert main(["plot", str(tmp_path / "region.json"), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "region.svg").exists()
    assert main(["plot", str(tmp_path / "config.json"), "--out", str(tmp_path)]) == 1
    capsys.readouterr()


def test_config_document_round_trip(tmp_path, capsys):
    cfg = RunConfig(
        command="simulate",
        input="inputs/mLV_half.json",
        varrho=Fraction(3, 1000),
        eta=Fraction(1, 64),
        epsilon=Fraction(2, 5),
        fan="normal",
        runs=7,
        seed=42,
        t_end=12.345678901234567,
        step=0.0025,
        t_hat=31.5,
        family=4,
        out="some/dir",
        svg=True,
    )
    assert config_from_document(config_to_document(cfg)) == cfg
    # the emitted config of a real run parses back identically
    assert main(["certify", _inp("mLV_half.json"), "--out", str(tmp_path),
                 "--varrho", "1/500", "--seed", "3"]) == 0
    emitted = json.loads((tmp_path / "config.json").read_text())
    back = config_from_document(emitted)
    assert back.varrho == Fraction(1, 500) and back.seed == 3
    capsys.readouterr()
