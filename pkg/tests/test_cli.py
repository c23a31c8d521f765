import json
import subprocess
import sys
from pathlib import Path

import pandas as pd
import pytest

from orlicz_kit import cli
from orlicz_kit.errors import DomainError, EvaluationError, NumericalDegeneracy

data_dir = Path(__file__).parent


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "orlicz_kit.cli", *args],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
    )


def table(stdout):
    return [line.split("\t") for line in stdout.strip().splitlines()]


def test_cli_norm():
    result = run_cli("norm", "--family", "power", "--p", "4", "--vec", "1,1")
    assert result.returncode == 0
    rows = table(result.stdout)
    assert rows[0] == ["norm", "modular"]
    assert float(rows[1][0]) == pytest.approx(2**0.25, rel=1e-12)
    assert float(rows[1][1]) == pytest.approx(1.0, abs=1e-9)

    result = run_cli("norm", "--family", "exp_weighted", "--p", "4", "--vec=-1")
    assert float(table(result.stdout)[1][0]) == 1.0

    result = run_cli("norm", "--vec=")
    assert result.returncode == 0
    assert table(result.stdout)[1] == ["0.0", "0.0"]


def test_cli_norm_file():
    result = run_cli("norm", "--family", "power", "--p", "2", "--file", str(data_dir / "test_vectors.tsv"))
    assert result.returncode == 0
    rows = table(result.stdout)
    assert len(rows) == 3
    assert float(rows[1][0]) == pytest.approx(2**0.5, rel=1e-12)


def test_cli_norm_bad_input():
    result = run_cli("norm", "--vec", "1,x")
    assert result.returncode == 2
    assert "Cannot parse" in result.stderr


def test_cli_check_good():
    good = run_cli("check-good", "--family", "exp_weighted", "--p", "4")
    assert good.returncode == 0
    report = json.loads(good.stdout)
    assert report["result"]["is_good"]
    assert report["result"]["K"] == pytest.approx(19.0, rel=1e-9)

    bad = run_cli("check-good", "--family", "power", "--p", "2")
    assert bad.returncode == 3
    assert not json.loads(bad.stdout)["result"]["is_good"]


def test_cli_constants():
    result = run_cli("constants", "--family", "exp_weighted", "--p", "4")
    assert result.returncode == 0
    body = json.loads(result.stdout)["result"]
    assert body["C0"]["log10"] == pytest.approx(18.175, abs=1e-3)
    assert body["submult"]["holds"]


def test_cli_delta(tmp_path):
    result = run_cli("--output-dir", str(tmp_path), "delta", "--eps", "0.2")
    assert result.returncode == 0
    rows = table(result.stdout)
    assert rows[0][0] == "delta"
    assert float(rows[0][1]) > 0
    report = json.loads((tmp_path / "rigidity-report.json").read_text())
    assert report["command"] == "delta"
    assert report["mode"] == "certified"
    assert report["config"]["eps"] == 0.2
    assert report["result"]["certified"]["delta"]["log10"] < -200
    assert "K" in report["result"]["certified"]["provenance"]


def test_cli_delta_empirical(tmp_path):
    result = run_cli("--output-dir", str(tmp_path), "delta", "--eps", "0.2", "--mode", "empirical")
    assert result.returncode == 0
    report = json.loads((tmp_path / "rigidity-report.json").read_text())
    assert set(report["result"]) == {"empirical", "certified"}
    assert report["mode"] == "empirical"


def test_cli_delta_basis_rejects_power(tmp_path):
    result = run_cli(
        "--output-dir", str(tmp_path), "delta", "--family", "power", "--p", "4", "--eps", "0.1", "--basis"
    )
    assert result.returncode == 3
    assert "alpha" in result.stderr
    assert not (tmp_path / "basis-report.json").exists()


def test_cli_disjointness_is_deterministic(tmp_path):
    args = ["disjointness", "--n", "6", "--eps", "0.2", "--trials", "20", "--seed", "7"]
    first = run_cli("--output-dir", str(tmp_path / "a"), *args)
    second = run_cli("--output-dir", str(tmp_path / "b"), *args)
    assert first.returncode == 0
    assert second.returncode == 0
    assert table(first.stdout)[-1] == ["failures", "0"]
    report = (tmp_path / "a" / "disjointness-report.json").read_bytes()
    assert report == (tmp_path / "b" / "disjointness-report.json").read_bytes()
    assert len(pd.read_csv(tmp_path / "a" / "disjointness.csv")) == 20


def test_cli_transitivity(tmp_path):
    result = run_cli(
        "--output-dir",
        str(tmp_path),
        "transitivity",
        "--k",
        "2",
        "--n",
        "6",
        "--eps",
        "0.2",
        "--trials",
        "20",
        "--seed",
        "3",
    )
    assert result.returncode == 0
    assert table(result.stdout) == [["max defect", "0.0"], ["failures", "0"]]
    report = json.loads((tmp_path / "transitivity-report.json").read_text())
    assert report["result"]["failures"] == 0
    assert len(report["result"]["trials"]) == 20


def test_cli_age(tmp_path):
    result = run_cli(
        "--output-dir",
        str(tmp_path),
        "age",
        "--block-sizes",
        "10,100",
        "--pairs",
        "5",
        "--dim",
        "4",
    )
    assert result.returncode == 0
    rows = table(result.stdout)
    assert rows[0][0] == "margin"
    assert float(rows[0][1]) == pytest.approx(0.147, abs=1e-3)
    blocks = pd.read_csv(tmp_path / "age-blocks.csv")
    assert blocks["N"].tolist() == [10, 100]


def test_cli_age_power_is_inconclusive(tmp_path):
    result = run_cli(
        "--output-dir", str(tmp_path), "age", "--family", "power", "--p", "4", "--block-sizes", "10", "--pairs", "2"
    )
    assert result.returncode == 3
    assert "inconclusive" in result.stderr


def test_cli_boyd():
    result = run_cli("boyd", "--p", "5", "--decades", "6", "--count", "512", "--lp", "5")
    assert result.returncode == 0
    body = json.loads(result.stdout)["result"]
    assert body["ratio_bounds"]["holds"]
    assert body["alpha_M"] <= body["beta_M"]


def test_cli_witness():
    result = run_cli("witness", "--family", "power", "--p", "2", "--f", "1,0.1", "--g", "0.1,1")
    assert result.returncode == 0
    body = json.loads(result.stdout)
    assert body["error"] == pytest.approx(0.1, rel=1e-10)
    assert body["witness"]["A"] == [0]


def test_cli_snap():
    hit = run_cli("snap", "--vec", "0.99,0.01", "--h", "0.1")
    assert hit.returncode == 0
    assert table(hit.stdout) == [["h", "0.1"], ["0", "+1"]]
    miss = run_cli("snap", "--vec", "0.5,0.5", "--h", "0.1")
    assert table(miss.stdout)[1] == ["none"]


def test_cli_align():
    t1, t2 = str(data_dir / "test_t1.csv"), str(data_dir / "test_t2.csv")
    exhaustive = run_cli("align", "--t1", t1, "--t2", t2, "--exhaustive")
    assert exhaustive.returncode == 0
    assert json.loads(exhaustive.stdout)["alignment"]["defect_bound"] == 0.0

    result = run_cli("align", "--t1", t1, "--t2", t2, "--eps", "0.1")
    assert result.returncode == 0
    body = json.loads(result.stdout)
    assert body["alignment"]["defect_bound"] == 0.0
    assert [w["index"] for w in body["witnesses"][1]] == [3, 2]
    assert [w["sign"] for w in body["witnesses"][1]] == [1.0, -1.0]


def test_cli_align_bad_matrix(tmp_path):
    t1 = tmp_path / "t1.csv"
    t1.write_text("1,0\nx,1\n0,0\n0,0\n")
    result = run_cli("align", "--t1", str(t1), "--t2", str(data_dir / "test_t2.csv"), "--exhaustive")
    assert result.returncode == 2
    assert "Non-numeric coordinate 'x' at row 1, column 0" in result.stderr


def test_cli_transitivity_is_certified_only(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"mode": "empirical"}))
    args = ["--output-dir", str(tmp_path), "--config", str(config), "transitivity", "--trials", "1"]
    result = run_cli(*args)
    assert result.returncode == 2
    assert "certified" in result.stderr
    assert not (tmp_path / "transitivity-report.json").exists()

    result = run_cli("--output-dir", str(tmp_path), "transitivity", "--mode", "empirical")
    assert result.returncode == 2
    assert "unrecognized arguments" in result.stderr


@pytest.mark.parametrize("error", [EvaluationError, DomainError, NumericalDegeneracy])
def test_cli_numerical_failures_exit_3(monkeypatch, capsys, error):
    def fail(config):
        raise error("slope vanished")

    monkeypatch.setitem(cli.COMMANDS, "witness", fail)
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["witness", "--f", "1", "--g", "1"])
    assert excinfo.value.code == 3
    assert "slope vanished" in capsys.readouterr().err


def test_cli_config_file_and_override(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"function": {"family": "power", "p": 2}, "eps": 0.2}))
    assert run_cli("--config", str(config), "check-good").returncode == 3
    result = run_cli("--config", str(config), "check-good", "--p", "4")
    assert result.returncode == 0
    assert json.loads(result.stdout)["config"]["p"] == 4.0

    config.write_text("{not json")
    assert run_cli("--config", str(config), "check-good").returncode == 2


def test_cli_db(tmp_path):
    db = f"sqlite:///{tmp_path / 'runs.sqlite'}"
    assert run_cli("--db", db, "init").returncode == 0
    result = run_cli("--db", db, "--output-dir", str(tmp_path), "delta", "--eps", "0.2")
    assert result.returncode == 0
    runs = run_cli("--db", db, "runs")
    assert runs.returncode == 0
    rows = table(runs.stdout)
    assert rows == [["1", "delta", "exp_weighted", "4", "certified"]]


def test_cli_output_dir_is_a_file(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    result = run_cli("--output-dir", str(blocker), "delta", "--eps", "0.2")
    assert result.returncode == 4


def test_cli_unknown_command():
    result = run_cli("frobnicate")
    assert result.returncode == 2
    assert "Unrecognized command" in result.stderr
