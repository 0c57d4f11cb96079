"""Command-line front end: formats, exit codes and determinism."""
import argparse
import csv
import functools
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from sl2coeffs.asym import ScanReport
from sl2coeffs.cli import main, parse_complex, parse_grid, parse_window
from sl2coeffs.coeffs import frak_p_value


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# ------------------------------------------------------------------ parsing

@pytest.mark.parametrize(
    "text, z",
    [("-0.5+1i", complex(-0.5, 1)), ("2", 2), ("-3i", -3j), ("1e-3-2.5i", complex(1e-3, -2.5)), ("i", 1j)],
)
def test_parse_complex(text, z):
    assert parse_complex(text) == z


@pytest.mark.parametrize("bad", ["1 + 2i", "abc", "1+2j+3", ""])
def test_parse_complex_rejects(bad):
    with pytest.raises(argparse.ArgumentTypeError):
        parse_complex(bad)


def test_parse_grid():
    assert parse_grid("lin:1:3:3") == [1.0, 2.0, 3.0]
    g = parse_grid("log:1:100:3")
    assert g == pytest.approx([1.0, 10.0, 100.0])
    assert parse_grid("2.5") == [2.5]
    for bad in ["lin:1:2:0", "cubic:1:2:3", "log:0:1:3", "lin:1:2"]:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_grid(bad)


def test_parse_window():
    assert parse_window("-5:5") == (-5, 5)
    with pytest.raises(argparse.ArgumentTypeError):
        parse_window("5:-5")


# ----------------------------------------------------------------- commands

def test_eval_matches_library(capsys):
    code, out, _ = run(capsys, "eval", "--ell=-0.5+1i", "--eps=0", "--m=3", "--n=1", "--x=5")
    assert code == 0
    (r,) = rows(out)
    ref = frak_p_value(complex(-0.5, 1), 3.0, 1.0, 2, 5.0)
    assert complex(float(r["re"]), float(r["im"])) == ref.value
    assert r["method"] == ref.method
    assert float(r["est_err"]) < 1e-10
    assert list(r) == ["x", "m", "n", "re", "im", "method", "est_err"]


def test_eval_identity(capsys):
    code, out, _ = run(capsys, "eval", "--lambda=1", "--x=1", "--m=2", "--n=2")
    (r,) = rows(out)
    assert code == 0 and float(r["re"]) == 1.0 and float(r["im"]) == 0.0


def test_eval_grid_json(capsys):
    code, out, _ = run(capsys, "eval", "--lambda=1", "--m=lin:0:4:5", "--n=0", "--x=log:1:10:3", "--format=json")
    data = json.loads(out)
    assert code == 0 and len(data) == 15
    assert [(d["x"], d["m"]) for d in data[:2]] == [(1.0, 0.0), (1.0, 1.0)]


def test_eval_output_file(tmp_path, capsys):
    path = tmp_path / "v.csv"
    code, out, _ = run(capsys, "eval", "--lambda=1", "--m=1", "--n=0", "--x=3", "-o", str(path))
    assert code == 0 and out == ""
    assert rows(path.read_text())[0]["m"] == "1.0"


def test_approx(capsys):
    code, out, _ = run(capsys, "approx", "--kind=principal", "--lambda=1", "--m=lin:1:3:3", "--n=0", "--x=5")
    assert code == 0 and len(rows(out)) == 3


def test_scan_pass_and_round_trip(capsys):
    argv = ["scan", "--kind=principal", "--lambda=1", "--n=0", "--xgrid=log:1:100:8", "--mgrid=lin:1:200:8"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    rep = ScanReport.from_json(out)
    assert rep.verdict == "PASS"
    assert ScanReport.from_json(rep.to_json()) == rep
    for key in ["grid", "sup_stat", "trend_slope", "verdict", "excluded_points"]:
        assert key in json.loads(out)


def test_scan_threads_byte_identical(capsys):
    argv = ["scan", "--kind=discrete", "--ell=-1", "--n=1", "--xgrid=log:1:100:6", "--mgrid=lin:1:200:6"]
    _, one, _ = run(capsys, *argv, "--threads=1")
    _, three, _ = run(capsys, *argv, "--threads=3")
    assert one == three


def test_column_csv(capsys):
    code, out, _ = run(capsys, "column", "--lambda=1", "--n=0", "--x=1", "--window=-2:2")
    r = rows(out)
    assert code == 0 and len(r) == 5
    assert [float(v["left"]) for v in r] == [-2.0, -1.0, 0.0, 1.0, 2.0]


def test_fourier_oracle(capsys):
    code, out, _ = run(capsys, "fourier", "--ell=-1", "--n=0", "--y=0.5", "--oracle")
    (r,) = rows(out)
    assert code == 0
    assert abs(float(r["re"]) - float(r["quad_re"])) < 1e-8


def test_norms_json(capsys):
    code, out, _ = run(capsys, "norms", "--ell=-0.25", "--eps=0.25")
    d = json.loads(out)
    assert code == 0
    assert d["ub_norm_min"] == 1.0
    assert d["optimal_weight_ratio"] is None


# --------------------------------------------------------------- exit codes

def test_domain_error_exit(capsys):
    code, _, _ = run(capsys, "fourier", "--ell=-1", "--n=0", "--y=0")
    assert code == 1


def test_scan_fail_exit(capsys, monkeypatch):
    # injected fault: an m^3 scaling makes the statistic grow
    import sl2coeffs.cli as cli

    real = cli.residual_scan
    faulty = functools.partial(real, scaling=lambda x, m: np.sqrt(x) * m**3)
    monkeypatch.setattr(cli, "residual_scan", faulty)
    code, out, _ = run(capsys, "scan", "--kind=principal", "--lambda=1", "--n=0",
                       "--xgrid=log:1:100:8", "--mgrid=lin:1:200:8")
    assert code == 2
    assert json.loads(out)["verdict"] == "FAIL"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--lambda=1", "--m=1", "--n=0"],
        ["eval", "--lambda=1", "--m=1", "--n=0", "--x=lin:1:2"],
        ["eval", "--ell=1+", "--m=1", "--n=0", "--x=2"],
        ["bogus"],
        ["scan", "--kind=nonsense", "--lambda=1", "--n=0", "--xgrid=2", "--mgrid=2"],
    ],
)
def test_usage_exit(argv, capsys):
    code = None
    try:
        code = main(argv)
    except SystemExit as e:
        code = e.code
    capsys.readouterr()
    assert code == 64


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sl2coeffs", "eval", "--lambda=1", "--m=2", "--n=2", "--x=1"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert rows(proc.stdout)[0]["re"] == "1.0"
