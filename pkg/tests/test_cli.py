from __future__ import annotations

import csv
import json

import pytest

from nonorient import __version__
from nonorient.cli import OUTPUT_ENV, main


def report(path, cmd):
    return json.loads((path / f"{cmd}.json").read_text())


def test_collar(tmp_path, capsys):
    assert main(["collar", "--kmax", "5", "--out", str(tmp_path)]) == 0
    rep = report(tmp_path, "collar")
    assert rep["ok"] and rep["claim"] == "collar-lemma" and rep["version"] == __version__
    rows = list(csv.DictReader((tmp_path / "collar.csv").open()))
    assert len(rows) == 11
    assert json.loads(capsys.readouterr().out)["ok"]


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    assert main(["markoff", "--arity", "3", "--bound", "100"]) == 0
    rep = report(tmp_path, "markoff")
    assert rep["claim"] == "markoff-growth"
    assert (tmp_path / "markoff.csv").exists()


def test_enumerate_and_fit(tmp_path):
    assert main(["enumerate", "--model", "N21", "--sided", "one_sided", "--lmax", "20",
                 "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "enumerate")["claim"] == "simple-geodesics"
    assert main(["fit", "--input", str(tmp_path / "enumerate.csv"), "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "fit")["claim"] == "growth-exponent"
    # an impossible window fails the built-in check
    assert main(["fit", "--model", "N21", "--sided", "one_sided", "--lmax", "100",
                 "--expect", "5,6", "--out", str(tmp_path)]) == 1


def test_bx_identity_and_pml(tmp_path):
    assert main(["bx-identity", "--L", "100", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "bx-identity")["claim"] == "bx-identity"
    assert main(["pml-orbit", "--start", "0:1/3", "--depth", "4", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "pml-orbit")["claim"] == "pml-closure"
    assert main(["pml-orbit", "--model", "N13", "--depth", "3", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "pml-orbit")["claim"] == "pml-tangency"


def test_volume(tmp_path):
    assert main(["volume", "--eps", "0.1,0.2", "--cap", "4", "--samples", "2000",
                 "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "volume")["claim"] == "norbury-divergence"
    assert main(["volume", "--eps", "0.1", "--cap", "4", "--samples", "2000",
                 "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "volume")["claim"] == "norbury-finite"


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nbound = 50\narity = 3\n")
    assert main(["markoff", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "markoff")["inputs"]["bound"] == 50
    assert main(["markoff", "--config", str(cfg), "--bound", "200", "--out", str(tmp_path)]) == 0
    assert report(tmp_path, "markoff")["inputs"]["bound"] == 200


def test_usage_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["markoff", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert main(["markoff", "--arity", "x"]) == 2
    assert main(["nosuch"]) == 2
    assert main(["--version"]) == 0
    capsys.readouterr()


def test_module_errors_exit_one(tmp_path, capsys):
    assert main(["markoff", "--arity", "4", "--bound", "1", "--out", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "ValueError in markoff." in err


def test_byte_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["volume", "--samples", "1000", "--seed", "4", "--cap", "4",
                     "--out", str(d)]) == 0
    for name in ("volume.json", "volume.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_count_report_is_json(tmp_path):
    assert main(["count", "--model", "N3", "--sided", "two_sided", "--lmax", "60",
                 "--out", str(tmp_path)]) in (0, 1)
    rep = report(tmp_path, "count")
    assert rep["claim"] == "thm1-deficiency" and isinstance(rep["checks"]["certified"], bool)
