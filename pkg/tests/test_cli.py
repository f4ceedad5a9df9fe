import json

import numpy as np
import pytest

from wenosnn.cli import main
from wenosnn.snn import load_model

SMALL = {"stage1_epochs": 2, "stage2_epochs": 2, "n_samples": 64}


def write_cfg(path, **extra):
    path.write_text(json.dumps({**SMALL, **extra}))
    return path


def test_run_ok(tmp_path, capsys):
    assert main(["run", "--problem", "sod", "--scheme", "z", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "sod-z.csv").exists()
    assert "L1=" in capsys.readouterr().out


def test_config_errors(tmp_path):
    assert main(["run", "--problem", "sod", "--scheme", "snn1", "--out", str(tmp_path)]) == 2
    assert main(["run", "--problem", "nowhere", "--out", str(tmp_path)]) == 2
    assert main(["run", "--problem", "sod", "--cfl", "3", "--out", str(tmp_path)]) == 2
    assert main(["run", "--problem", "sod", "--scheme", "snn1", "--model", str(tmp_path / "x.wsnn"),
                 "--out", str(tmp_path)]) == 2
    assert main(["bogus"]) == 2


def test_corrupt_model(tmp_path, trained):
    bad = tmp_path / "bad.wsnn"
    data = bytearray(trained["snn1_path"].read_bytes())
    data[40] ^= 1
    bad.write_bytes(bytes(data))
    assert main(["run", "--problem", "sod", "--scheme", "snn1", "--model", str(bad), "--out", str(tmp_path)]) == 2


def test_numerical_failure(tmp_path):
    cfg = write_cfg(tmp_path / "t.json", lr=1e300)
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_train_metadata(tmp_path):
    cfg = write_cfg(tmp_path / "t.json")
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "l2")]) == 0
    m = load_model(tmp_path / "l2" / "snn2-seed0.wsnn")
    assert m.stage == "snn2" and m.hyper == 2.5
    assert main(["train", "--config", str(cfg), "--loss", "L1", "--out", str(tmp_path / "l1")]) == 0
    m = load_model(tmp_path / "l1" / "snn1-seed0.wsnn")
    assert m.stage == "snn1" and m.hyper == 35.0
    log = (tmp_path / "l1" / "snn1-seed0-log.csv").read_text().splitlines()
    assert log[0] == "stage,epoch,loss" and len(log) == 5


def test_train_toml_and_determinism(tmp_path):
    cfg = tmp_path / "t.toml"
    cfg.write_text('loss = "L2"\nseed = 4\nstage1_epochs = 2\nstage2_epochs = 3\nn_samples = 64\n')
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "a")]) == 0
    assert main(["train", "--config", str(cfg), "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "snn2-seed4.wsnn").read_bytes()
    assert a == (tmp_path / "b" / "snn2-seed4.wsnn").read_bytes()


def test_convergence_and_compare(tmp_path, capsys, trained):
    assert main(["convergence", "--problem", "advection-sine", "--scheme", "js", "--grids", "10", "20",
                 "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["N", "L1", "order", "Linf", "order"] and out[1].split()[0] == "10"
    assert (tmp_path / "advection-sine-js-convergence.csv").exists()
    assert main(["compare", "--problem", "burgers-riemann", "--schemes", "js", "z", "snn1",
                 "--model1", str(trained["snn1_path"]), "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "burgers-riemann-compare.csv").read_text().splitlines()
    assert lines[0] == "x,reference,js,z,snn1" and len(lines) == 102


def test_run_from_manifest(tmp_path):
    assert main(["run", "--problem", "burgers-riemann", "--out", str(tmp_path / "a")]) == 0
    manifest = tmp_path / "a" / "burgers-riemann-js-manifest.json"
    assert main(["run", "--problem", "burgers-riemann", "--config", str(manifest),
                 "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "burgers-riemann-js.csv").read_bytes()
    assert a == (tmp_path / "b" / "burgers-riemann-js.csv").read_bytes()


def test_problems_listing(capsys):
    assert main(["problems"]) == 0
    out = capsys.readouterr().out
    assert "double-mach" in out and "long-running" in out


def test_reference(tmp_path, capsys):
    assert main(["reference", "--problem", "burgers-riemann", "--n", "20", "--cache", str(tmp_path)]) == 0
    assert "200 cells" in capsys.readouterr().out
