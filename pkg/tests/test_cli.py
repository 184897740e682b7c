import csv
import io
import json
import math

import pytest

from hwgap.cli import SweepSpec, UsageError, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_gap_row(capsys):
    code, out, _ = run(["gap", "--n", "10000", "--B", "1"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,B,gap,regime"
    (r,) = rows(out)
    assert float(r["gap"]) == pytest.approx(0.2512578, abs=1e-7)
    assert r["regime"] == "SpectrumEdge"
    assert "\r" not in out


def test_seventeen_digits(capsys):
    _, out, _ = run(["zeta", "--B", "1"], capsys)
    value = out.splitlines()[1].split(",")[1]
    assert len(value.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_bstar_command(capsys):
    code, out, _ = run(["bstar", "--tol", "1e-6"], capsys)
    assert code == 0
    b = float(rows(out)[0]["bstar"])
    assert math.sqrt(2) <= b < 2
    assert b == pytest.approx(1.8572217, abs=1e-6)


def test_gamma_sweep(capsys):
    argv = ["sweep", "--quantity", "gamma_limit", "--start", "0.1", "--end", "4", "--steps", "64"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    data = rows(out)
    assert len(data) == 64
    gam = [float(r["gamma"]) for r in data]
    assert all(b > a for a, b in zip(gam, gam[1:]))


def test_deterministic_output(capsys):
    argv = ["sweep", "--quantity", "zeta", "--start", "0.2", "--end", "2", "--steps", "9", "--workers", "3"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    _, serial, _ = run(argv[:-2] + ["--workers", "1"], capsys)
    assert first == second == serial


@pytest.mark.parametrize("quantity,extra,cols", [
    ("gap_finite", ["--n", "400"], ["n", "B", "gap", "regime"]),
    ("bstar_finite", [], ["n", "B_star", "rho_star"]),
])
def test_other_sweeps(quantity, extra, cols, capsys):
    start, end = ("0.5", "2.5") if quantity == "gap_finite" else ("10", "40")
    argv = ["sweep", "--quantity", quantity, "--start", start, "--end", end, "--steps", "4"] + extra
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(cols)
    assert len(rows(out)) == 4


def test_exit_codes(capsys):
    assert run(["gap", "--n", "4", "--B", "2"], capsys)[0] == 3
    assert run(["gap", "--n", "abc"], capsys)[0] == 1
    assert run(["nonsense"], capsys)[0] == 1
    assert run([], capsys)[0] == 1
    assert run(["gap", "--n", "10"], capsys)[0] == 1
    assert run(["transient", "--n", "50", "--B", "2.5", "--i", "1", "--j", "1", "--t", "1"], capsys)[0] == 3
    assert run(["oracle-gap", "--n", "10", "--B", "1", "--trunc", "8000"], capsys)[0] == 2


def test_env_tolerance_validation(monkeypatch, capsys):
    monkeypatch.setenv("HWS_QUAD_ABS_TOL", "-1")
    assert run(["zeta", "--B", "1"], capsys)[0] == 1


def test_json_mode(capsys):
    code, out, _ = run(["limit-gap", "--B", "10", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["regime"] == "Root"
    assert 0 < data["complement"] < 1e-18


def test_out_path(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, out, _ = run(["tstar", "--a", "2", "--B", "1", "--eps", "0.01", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    assert float(rows(raw.decode())[0]["t_star"]) == pytest.approx(50.4207, abs=1e-4)


@pytest.mark.parametrize("argv,col", [
    (["transient", "--n", "10", "--B", "1", "--i", "8", "--j", "12", "--t", "1"], "value"),
    (["cdf-diff", "--n", "10", "--B", "1", "--i", "10", "--j", "10", "--t", "1"], "bound"),
    (["bounds", "--n", "10000", "--B", "1", "--t", "4"], "pmf_bound"),
    (["literature-bounds", "--n", "50", "--B", "1", "--t", "1"], "chen"),
    (["bstar-finite", "--n", "100"], "B_star"),
    (["limit-gap", "--B", "2.5"], "gamma"),
    (["oracle-gap", "--n", "20", "--B", "2.5", "--trunc", "1000"], "gap"),
])
def test_subcommands_produce_values(argv, col, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    for r in rows(out):
        assert math.isfinite(float(r[col]))


def test_validate_quick(capsys):
    code, out, err = run(["validate", "--suite", "quick"], capsys)
    assert code == 0
    data = rows(out)
    assert [int(r["criterion"]) for r in data] == [2, 5, 6, 7, 11, 12]
    assert all(r["passed"] == "true" for r in data)
    assert err.count("[PASS]") == 6


def test_sweep_spec_validation():
    with pytest.raises(UsageError):
        SweepSpec(1.0, 0.5, 10, "zeta")
    with pytest.raises(UsageError):
        SweepSpec(0.1, 0.5, 1, "zeta")
    assert SweepSpec(0.0, 1.0, 3, "zeta").points() == [0.0, 0.5, 1.0]
