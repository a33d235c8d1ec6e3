import io
import json
import math
import os
import subprocess
import sys

import pytest

from evarkit.cli import main
from golden_cases import CASES, FIXTURES, GOLDEN, resolve, run


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = run(CASES[name])
    assert code == 0
    assert text == (GOLDEN / name).read_text()


@pytest.mark.parametrize("name", ["eval_mixed.txt", "kusuoka_mixed.json"])
def test_deterministic(name):
    assert run(CASES[name]) == run(CASES[name])


def test_eval_samples_zero_region():
    code, text = run(CASES["eval_samples.json"])
    rec = json.loads(text)
    assert rec["schema_version"] == 1
    assert rec["evar_dual"] == 0.0 and rec["evar_primal"] == 0.0 and rec["cvar"] == 0.0


def test_eval_constant_all_equal():
    rec = json.loads(run(CASES["eval_constant.json"])[1])
    for key in ("mean", "ess_inf", "evar_primal", "evar_dual", "cvar", "u_lambda"):
        assert rec[key] == 5.0


def test_eval_indicator_value():
    rec = json.loads(run(CASES["eval_indicator.json"])[1])
    assert rec["evar_dual"] == pytest.approx(0.311, abs=5e-4)
    assert rec["u_lambda"] == pytest.approx(rec["evar_dual"], abs=1e-9)


def test_lambda_curve_columns():
    code, text = run(["lambda-curve", "--alpha", "0.3", "--points", "41"])
    assert code == 0
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    a = [float(r[0]) for r in rows]
    lam = [float(r[1]) for r in rows]
    assert (a[0], lam[0]) == (0.0, 0.0) and (a[-1], lam[-1]) == (1.0, 1.0)
    assert all(v == 0.0 for x, v in zip(a, lam) if x <= 0.7)
    assert all(r[2] == "" for x, r in zip(a, rows) if x <= 0.7 or x == 1.0)
    assert all(y >= x for x, y in zip(lam, lam[1:]))
    h = a[1] - a[0]
    assert all(lam[i + 1] - 2 * lam[i] + lam[i - 1] >= -1e-9 * h * h for i in range(1, len(lam) - 1))


def test_lambda_curve_interpolated_close():
    _, direct = run(["lambda-curve", "--alpha", "0.5", "--points", "21"])
    _, interp = run(["lambda-curve", "--alpha", "0.5", "--points", "21", "--interpolate"])
    for d_row, i_row in zip(direct.splitlines()[1:], interp.splitlines()[1:]):
        assert float(d_row.split(",")[1]) == pytest.approx(float(i_row.split(",")[1]), abs=1e-6)


def test_kusuoka_two_point_and_degenerate(tmp_path):
    f = tmp_path / "two.csv"
    f.write_text("0,0.2\n1,0.8\n")
    code, text = run(["kusuoka", "--alpha", "0.5", "--input", str(f), "--weighted"])
    rec = json.loads(text)
    assert code == 0 and abs(rec["difference"]) <= 1e-6 and not rec["degenerate"]
    code, text = run(["kusuoka", "--alpha", "0.1", "--input", str(f), "--weighted"])
    rec = json.loads(text)
    assert code == 0 and rec["degenerate"] and rec["mixture"] == pytest.approx(0.0, abs=1e-15) and "note" in rec


def test_verify_witness_and_constant():
    code, text = run(["verify", "--alpha", "0.5", "--input", "samples_01.csv", "--witness", "0.6,0.8"])
    assert code == 0
    assert "PASS  witness_strict_gap" in text
    code, text = run(["verify", "--alpha", "0.4", "--input", "constant_w.csv", "--weighted", "--json"])
    rec = json.loads(text)
    assert code == 0 and rec["passed"]


@pytest.mark.parametrize("name", ["eval_mixed.txt", "verify_mixed.txt", "eval_indicator.json"])
def test_corrupted_tolerance_exit_2(name):
    argv = CASES[name] + ["--tol-entropy", "0.2"]
    code, _ = run(argv)
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--alpha", "1.5", "--input", "samples_01.csv"],
        ["eval", "--alpha", "0.5", "--input", "broken.csv"],
        ["eval", "--alpha", "0.5", "--input", "missing.csv"],
        ["eval", "--alpha", "0.5"],
        ["lambda-curve", "--alpha", "0.5", "--points", "1"],
        ["verify", "--alpha", "0.5", "--input", "samples_01.csv", "--witness", "0.4,0.8"],
        ["verify", "--alpha", "0.5", "--input", "samples_01.csv", "--witness", "zzz"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(resolve(argv), out=io.StringIO())
        raise SystemExit(code)
    assert exc.value.code == 1


def test_broken_input_reports_line(capsys):
    main(resolve(["eval", "--alpha", "0.5", "--input", "broken.csv"]), out=io.StringIO())
    assert "line 2" in capsys.readouterr().err


def test_subprocess_entry_point():
    env = dict(os.environ, NO_COLOR="1")
    proc = subprocess.run(
        [sys.executable, "-m", "evarkit", *resolve(CASES["eval_samples.json"])],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "eval_samples.json").read_text()
    proc = subprocess.run(
        [sys.executable, "-m", "evarkit", *resolve(CASES["verify_mixed.txt"]), "--tol-entropy", "0.2"],
        capture_output=True, text=True, env=env,
    )
    assert proc.returncode == 2
