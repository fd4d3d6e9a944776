"""End-to-end CLI coverage: exit codes, file outputs, formats."""

import csv
import json

import pytest

from cfra.cli import main


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text("num_inactive_ues = 200\n")
    return path


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_analyze_csv(tmp_path):
    code = main(["analyze", "--out", str(tmp_path), "--num-ues", "1000", "5000"])
    assert code == 0
    rows = _read_csv(tmp_path / "analyze.csv")
    assert len(rows) == 2
    assert float(rows[0]["psi"]) == pytest.approx(1.0)


def test_analyze_json(tmp_path):
    assert main(["analyze", "--out", str(tmp_path), "--format", "json",
                 "--num-ues", "2000"]) == 0
    rows = json.loads((tmp_path / "analyze.json").read_text())
    assert rows[0]["num_inactive_ues"] == 2000


def test_simulate(tmp_path, small_cfg):
    code = main(["simulate", "--config", str(small_cfg), "--out", str(tmp_path),
                 "--trials", "2", "--seed", "1", "--protocol", "bcf"])
    assert code == 0
    rows = _read_csv(tmp_path / "simulate.csv")
    assert len(rows) == 2
    assert rows[0]["protocol"] == "bcf"


def test_sweep_writes_manifest(tmp_path, small_cfg):
    code = main(["sweep", "--config", str(small_cfg), "--out", str(tmp_path),
                 "--figure-class", "separability", "--values", "1000", "10000"])
    assert code == 0
    assert (tmp_path / "separability.csv").exists()
    assert (tmp_path / "separability.manifest.json").exists()


def test_train_lmax(tmp_path, small_cfg):
    code = main(["train-lmax", "--config", str(small_cfg), "--out", str(tmp_path),
                 "--rounds", "5", "--repetitions", "5", "--seed", "0"])
    assert code == 0
    rows = _read_csv(tmp_path / "train-lmax.csv")
    assert rows[-1]["round"] == "result"
    assert 1 <= int(rows[-1]["mean_serving_count"]) <= 64


def test_calibrate_delta(tmp_path, small_cfg):
    code = main(["calibrate-delta", "--config", str(small_cfg),
                 "--out", str(tmp_path), "--draws", "100"])
    assert code == 0
    rows = _read_csv(tmp_path / "calibrate-delta.csv")
    assert float(rows[0]["delta"]) >= 1.0


def test_estimators_bench(tmp_path, small_cfg):
    code = main(["estimators-bench", "--config", str(small_cfg),
                 "--out", str(tmp_path), "--trials", "2",
                 "--collision-sizes", "2", "--estimators", "est1", "cellular"])
    assert code == 0
    rows = _read_csv(tmp_path / "estimators-bench.csv")
    assert [r["estimator"] for r in rows] == ["est1", "cellular"]


def test_validation_failure_exit_code(tmp_path, capsys):
    code = main(["sweep", "--out", str(tmp_path), "--figure-class", "anaa-sweep",
                 "--values", "100", "--estimators", "est9"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_missing_config_exit_code(tmp_path, capsys):
    code = main(["analyze", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path)])
    assert code == 1
    assert "error:" in capsys.readouterr().err
