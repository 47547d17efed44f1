import json
import os
import subprocess
import sys

import pytest

from anihsi.cli import run


def _csv(path):
    lines = path.read_text().splitlines()
    header = json.loads(lines[0][2:])
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_profile_example(capsys):
    assert run(["profile", "--alpha", "3,6"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["valid"] is False and rec["violating_index"] == [1, 1]


def test_rho_example(capsys):
    assert run(["rho", "--alpha", "2,2", "--point", "3,4"]) == 0
    assert float(capsys.readouterr().out) == 5.0


def test_input_errors_exit_one(capsys):
    assert run(["rho", "--alpha", "2,2", "--bogus"]) == 1
    assert run(["rho", "--alpha", "2,2"]) == 1
    assert run(["rho", "--alpha", "2,-1", "--point", "1"]) == 1
    err = capsys.readouterr().err
    # problems are aggregated into one diagnostic
    assert "alpha entries must be positive" in err and "coordinates" in err
    assert run(["potential", "invert", "--alpha", "2,2", "--sizes", "4:16"]) == 1


def test_numerical_failure_exits_two(tmp_path):
    cfg = tmp_path / "q.json"
    cfg.write_text(json.dumps({"quadrature": {"R": 0.5, "tail_tol": 1e-12}}))
    assert run(["hsi", "apply", "--alpha", "0.5", "--point", "0", "--config", str(cfg),
                "--out", str(tmp_path / "x.csv")]) == 2


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha": "0.5", "point": [[0.0], [1.0]], "eps": [0.5]}))
    out = tmp_path / "a.csv"
    assert run(["hsi", "apply", "--config", str(cfg), "--eps", "0.25", "--out", str(out)]) == 0
    header, rows = _csv(out)
    assert header["eps"] == [0.25] and header["alpha"] == [0.5]
    assert header["command"] == "hsi apply" and "quadrature" in header
    assert rows[0] == ["eps", "x1", "value", "error_estimate"]
    assert [r[1] for r in rows[1:]] == ["0", "1"]


def test_hsi_apply_value(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["hsi", "apply", "--alpha", "0.5", "--point", "0", "--out", str(out)]) == 0
    _, rows = _csv(out)
    assert float(rows[1][2]) == pytest.approx(-9.803333619721423, rel=1e-8)


def test_approx_study_default_schedule(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["approx", "study", "--alpha", "1,1.5", "--p", "2,2", "--r", "2,2",
                "--out", str(out)]) == 0
    header, rows = _csv(out)
    assert rows[0] == ["delta", "N", "error", "relative"]
    assert len(rows) == 1 + 7 * 5
    assert header["L"] == 16.0 and header["N"] == 128
    assert float(rows[-1][3]) <= 0.01


def test_check_suite_json(tmp_path):
    out = tmp_path / "c.json"
    assert run(["check", "--suite", "lemmas", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert rec["passed"] and len(rec["probes"]) == 7


def _cli(args, threads):
    env = dict(os.environ, ANIHSI_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "anihsi.cli", *args], env=env,
                          capture_output=True, check=True).stdout


@pytest.mark.parametrize("args", [
    ["hsi", "apply", "--alpha", "1,1.5", "--point", "0,0", "--point", "0.5,-1", "--eps", "0,0.5"],
    ["potential", "invert", "--alpha", "1,1.5", "--sizes", "4:16,6:24"],
])
def test_thread_count_does_not_change_output(args):
    assert _cli(args, 1) == _cli(args, 4)
