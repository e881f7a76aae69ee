import json
import subprocess
import sys

import pytest

from opinet.cli import main


def _run(*argv):
    return main([str(a) for a in argv])


def test_simulate_then_infer_toy12(tmp_path, capsys):
    assert _run("simulate", "toy12", "--out", tmp_path / "sim") == 0
    assert _run("infer", tmp_path / "sim" / "trajectory.json", "--problem", 1, "--dump-pq", "--out", tmp_path / "inf") == 0
    doc = json.loads((tmp_path / "inf" / "result.json").read_text())
    assert doc["gamma"][:4] == pytest.approx([0.3, 0.2, 0.1, 0.1], abs=1e-8)
    assert doc["beta"][:4] == pytest.approx([0.5, 0.4, 0.3, 0.2], abs=1e-8)
    assert (tmp_path / "inf" / "P.csv").read_text().startswith("0.1816,-0.0818,")
    man = json.loads((tmp_path / "inf" / "manifest.json").read_text())
    assert set(man["outputs"]) == {"result.json", "P.csv", "Q.csv"}


def test_rank_deficient_exits_2(tmp_path, capsys):
    assert _run("simulate", "toy12", "--horizon", 6, "--out", tmp_path) == 0
    assert _run("infer", tmp_path / "trajectory.json", "--problem", 1, "--out", tmp_path / "inf") == 2
    doc = json.loads((tmp_path / "inf" / "result.json").read_text())
    assert doc["solvability"]["verdict"] == "RankDeficient"
    assert "RankDeficient" in capsys.readouterr().err


def test_horizon_zero_is_usage_error(tmp_path, capsys):
    assert _run("simulate", "toy12", "--horizon", 0, "--out", tmp_path) == 1


def test_random_x0_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert _run("simulate", "krackhardt", "--x0", "random:7", "--horizon", 20, "--out", tmp_path / d) == 0
    a = (tmp_path / "a" / "trajectory.csv").read_bytes()
    assert a == (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_x0_file(tmp_path, capsys):
    x0 = tmp_path / "x0.txt"
    x0.write_text(" ".join(["0.5"] * 12))
    assert _run("simulate", "toy12", "--x0", x0, "--out", tmp_path / "o") == 0
    x0.write_text("0.5 0.5")
    assert _run("simulate", "toy12", "--x0", x0, "--out", tmp_path / "o") == 1


def test_infer_krackhardt_problem3(tmp_path, capsys):
    assert _run("simulate", "krackhardt", "--horizon", 40, "--out", tmp_path) == 0
    assert _run("infer", tmp_path / "trajectory.json", "--problem", 3, "--p", 30, "--out", tmp_path / "inf") == 0
    doc = json.loads((tmp_path / "inf" / "result.json").read_text())
    assert doc["followers"] == [3, 4, 19, 20]
    assert "followers: 3 4 19 20" in capsys.readouterr().out


def test_infer_problem2_writes_source_residuals(tmp_path, capsys):
    assert _run("simulate", "toy12", "--out", tmp_path) == 0
    assert _run("infer", tmp_path / "trajectory.json", "--problem", 2, "--out", tmp_path / "inf") == 0
    doc = json.loads((tmp_path / "inf" / "result.json").read_text())
    assert len(doc["source_residuals"]) == 12


def test_reproduce_toy12(tmp_path, capsys):
    assert _run("reproduce", "toy12", "--out", tmp_path) == 0
    report = json.loads((tmp_path / "toy12_report.json").read_text())
    assert report["exact_recovery"] is True
    assert report["rank_P"] == 12


def test_reproduce_fig3_grid(tmp_path, capsys):
    assert _run("reproduce", "fig3", "--samples", 20, "--seed", 1, "--out", tmp_path) == 0
    lines = (tmp_path / "fig3_errors.csv").read_text().splitlines()
    assert lines[0] == "i,j,e_ij"
    assert len(lines) == 1 + 21 * 21
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["parameters"]["seed"] == 1 and man["parameters"]["samples"] == 20


def test_reproduce_fig4a(tmp_path, capsys):
    assert _run("reproduce", "fig4a", "--samples", 5, "--out", tmp_path) == 0
    lines = (tmp_path / "fig4a_mean_traj.csv").read_text().splitlines()
    assert lines[0].startswith("k,xbar_1,")
    assert len(lines) == 1 + 601


def test_unknown_figure(tmp_path, capsys):
    assert _run("reproduce", "fig9", "--out", tmp_path) == 1


def test_unknown_scenario(tmp_path, capsys):
    assert _run("simulate", "nosuch", "--out", tmp_path) == 1


def test_bad_scenario_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "opinet.scenario/1", "name": "x", "n": 1, "weights": [[0]], "extra": 1}')
    assert _run("simulate", bad, "--out", tmp_path / "o") == 1
    assert "extra" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "opinet", "reproduce", "toy12", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "rank(P) = 12" in proc.stdout


def test_out_of_range_x0_is_usage_error(tmp_path, capsys):
    x0 = tmp_path / "x0.txt"
    x0.write_text(" ".join(["1.5"] * 12))
    assert _run("simulate", "toy12", "--x0", x0, "--out", tmp_path / "o") == 1


def test_unexpected_failure_exits_3(tmp_path, monkeypatch, capsys):
    import opinet.cli as cli

    def boom(*a, **k):
        raise RuntimeError("broken")

    monkeypatch.setattr(cli, "simulate", boom)
    assert _run("simulate", "toy12", "--out", tmp_path) == 3
    assert "internal error" in capsys.readouterr().err
