from __future__ import annotations

import csv
import io
import math
import subprocess
import sys

import pytest

from kg1d.cli import run
from kg1d.output import fmt, read_body
from kg1d.params import beta_from_E, make_model


def rows(text):
    return list(csv.DictReader(io.StringIO("".join(
        ln for ln in text.splitlines(keepends=True) if not ln.startswith("#")))))


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_round_trip(capsys):
    code, out, _ = invoke(capsys, "solve", "--potential", "v1", "--s", "2", "--parity", "even",
                          "--nodes", "0", "--e-lo", "0", "--e-hi", "1")
    assert code == 0
    (row,) = rows(out)
    assert row["nodes"] == "0" and row["parity"] == "even"
    code, out, _ = invoke(capsys, "solve-cutoff", "--potential", "v1", "--E", row["E"])
    assert code == 0
    assert float(rows(out)[0]["s"]) == pytest.approx(2.0, rel=1e-9)


def test_deterministic_output(capsys, tmp_path):
    argv = ["solve", "--potential", "v2", "--s", "3", "--e-lo", "-1", "--e-hi", "0"]
    outs = []
    for i in range(2):
        path = tmp_path / f"run{i}.csv"
        assert run(argv + ["--out", str(path)]) == 0
        outs.append(path.read_text())
    assert read_body(tmp_path / "run0.csv") == read_body(tmp_path / "run1.csv")
    hashes = [ln for o in outs for ln in o.splitlines() if ln.startswith("# input_hash")]
    assert hashes[0] == hashes[1]


def test_no_eigenvalue_exit_code(capsys):
    code, out, err = invoke(capsys, "solve", "--potential", "v1", "--s", "0.5")
    assert code == 1
    assert "(0.0, 1.0)" in err


@pytest.mark.parametrize("argv", [
    ["solve", "--potential", "v9", "--s", "1"],
    ["solve", "--s", "1", "--a", "1e-4"],
    ["nonsense"],
    ["solve", "--s", "1", "--alpha", "0.7"],
    ["solve", "--s", "1", "--growth", "2"],
    ["solve-cutoff", "--E", "1.5"],
])
def test_usage_errors(capsys, argv):
    code, _, err = invoke(capsys, *argv)
    assert code == 2
    assert err


def test_manifest_only(capsys):
    code, out, _ = invoke(capsys, "special", "--manifest-only", "--alpha", "1/137")
    assert code == 0
    assert out.startswith("# kg1d run manifest")
    assert '"alpha": 0.0072992700729927' in out


def test_special_prints_published_columns(capsys):
    code, out, _ = invoke(capsys, "special", "--potential", "v1")
    assert code == 0
    table = {r["quantity"]: r for r in rows(out)}
    assert abs(float(table["s0"]["value"]) - 0.99906868) <= 1e-4
    assert float(table["s_inf"]["published"]) == 6.1711


def test_trace_csv_consistency(tmp_path):
    path = tmp_path / "fig.csv"
    assert run(["trace", "--potential", "v2", "--mode", "energy", "--points", "25",
                "--beta-max", "30", "--out", str(path)]) == 0
    text = path.read_text()
    assert text.startswith("# kg1d run manifest")
    assert "# mesh_policy:" in text and "# tolerances:" in text and "# duration_s:" in text
    p = make_model()
    table = rows(text)
    assert len(table) == 25
    for r in table:
        a, E, s, beta = (float(r[k]) for k in ("a", "E", "s", "beta"))
        assert s == pytest.approx(a / p.delta, rel=1e-10)
        assert beta == pytest.approx(beta_from_E(E, p), rel=1e-10, abs=1e-10)
    assert {r["branch"] for r in table} == {"upper", "lower"}
    assert min(float(r["s"]) for r in table) == pytest.approx(1.98216, abs=2e-2)


def test_trace_cutoff_mode(tmp_path):
    path = tmp_path / "cut.csv"
    assert run(["trace", "--potential", "v1", "--mode", "cutoff", "--points", "8",
                "--s-max", "10", "--out", str(path)]) == 0
    table = rows(path.read_text())
    assert {r["branch"] for r in table} == {"upper", "lower"}
    assert all(float(r["s"]) > 0.99 for r in table)


def test_balmer_and_oracle(capsys):
    code, out, _ = invoke(capsys, "balmer", "--ma", "1e-5", "--n-max", "1")
    assert code == 0
    (r,) = rows(out)
    assert abs(float(r["rel_dev_odd"])) < 1e-2 and abs(float(r["rel_dev_even"])) < 1e-2
    code, out, _ = invoke(capsys, "oracle", "--a", "0.05", "--n-grid", "200", "--richardson")
    assert code == 0
    assert float(rows(out)[0]["E"]) == pytest.approx(0.99766729, abs=1e-6)


def test_dump_shot(tmp_path):
    path = tmp_path / "shot.csv"
    assert run(["dump-shot", "--a", "0.05", "--E", "0.9", "--out", str(path)]) == 0
    table = rows(path.read_text())
    assert float(table[0]["x"]) == 0.0 and float(table[0]["psi"]) == 1.0


def test_fmt():
    assert fmt(1.0 / 3.0) == "0.333333333333"
    assert fmt(1.23456789012345e-7) == "0.000000123456789012"
    assert fmt(-math.inf) == "-inf"
    assert fmt(3) == "3"
    assert fmt("even") == "even"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kg1d", "solve", "--s", "0.5"],
                         capture_output=True, text=True)
    assert res.returncode == 1
