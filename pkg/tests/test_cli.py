import json
import subprocess
import sys

import numpy as np
import pytest

from fassoc import datasets
from fassoc.bvn import BvnSpec, discretize
from fassoc.cli import run
from fassoc.divergence import make_power, make_theta
from fassoc.measures import measure
from fassoc.table import format_grid, read_table, to_probability


@pytest.fixture
def white_csv(tmp_path):
    path = tmp_path / "white.csv"
    rows = ["degree,below,average,above"] + [f"d{i}," + ",".join(map(str, r)) for i, r in enumerate(datasets.RACE_WHITE)]
    path.write_text("\n".join(rows) + "\n")
    return str(path)


@pytest.fixture
def sparse_csv(tmp_path):
    path = tmp_path / "sparse.csv"
    path.write_text(format_grid(np.array(datasets.SPARSE_ARTIFICIAL), decimals=2))
    return str(path)


def test_measure_text(white_csv):
    code, out = run(["measure", white_csv, "--divergence", "power:0.0", "--variant", "v1"])
    assert code == 0
    assert out.strip() == "0.068 0.008 (0.052, 0.083)"


def test_measure_probability_table(sparse_csv):
    code, out = run(["measure", sparse_csv, "-d", "theta:0.9", "-v", "v3:harmonic"])
    assert (code, out.strip()) == (0, "0.055")


def test_measure_independent(tmp_path):
    path = tmp_path / "ind.csv"
    path.write_text("10,20,30\n20,40,60\n")
    code, out = run(["measure", str(path), "-d", "theta:0.5"])
    assert code == 0 and out.startswith("0.000")


def test_measure_json_full_precision(white_csv):
    code, out = run(["measure", white_csv, "--output", "json"])
    rec = json.loads(out)[0]
    white = to_probability(datasets.load("race-white"))
    assert rec["estimate"] == pytest.approx(measure(make_power(0), white, "v1").value, rel=1e-15)
    assert rec["n"] == 2155


@pytest.mark.parametrize(
    "argv, code",
    [
        (["measure", "/nonexistent.csv"], 1),
        (["measure", "{sparse}", "-d", "renyi:2"], 1),
        (["measure", "{sparse}", "-d", "theta:1.5"], 2),
        (["measure", "{sparse}", "-d", "kl", "--n", "100"], 3),
        (["generate-bvn", "--rho", "1.5"], 2),
        (["sweep", "--bvn-rho", "0.4", "--grid", ","], 2),
        (["coverage", "--rho", "0.2", "--iters"], 1),
    ],
)
def test_exit_codes(argv, code, sparse_csv, capsys):
    argv = [a.replace("{sparse}", sparse_csv) for a in argv]
    assert run(argv)[0] == code
    assert capsys.readouterr().err


def test_bad_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3\n")
    assert run(["measure", str(path)])[0] == 2
    path.write_text("1,2\n3,oops\n4,5\n")
    assert run(["measure", str(path)])[0] == 1


def test_sweep_columns():
    code, out = run(["sweep", "--bvn-rho", "0.8", "--grid", "0,0.2,0.4,0.6,0.8,1.0"])
    assert code == 0
    assert [line.split()[-1] for line in out.splitlines()] == ["0.254", "0.255", "0.251", "0.244", "0.234", "0.224"]
    code, out = run(["sweep", "--bvn-rho", "0.4", "--family", "theta", "--grid", "0.9,0.7,0.5,0.3,0.1,0", "--output", "csv"])
    lines = out.splitlines()
    assert lines[0].startswith("param,variant,estimate")
    values = [round(float(line.split(",")[2]), 3) for line in lines[1:]]
    assert values == [0.042, 0.049, 0.055, 0.053, 0.042, 0.019]


def test_sweep_reports_row_failures_inline(sparse_csv):
    code, out = run(["sweep", sparse_csv, "--grid", "0,1", "--variants", "v1,v3", "--n", "100"])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 4
    assert "ZeroCellDerivativeError" in lines[0] and "ZeroCellDerivativeError" in lines[1]
    assert lines[3].split()[2] == "0.254"


def test_generate_bvn():
    code, out = run(["generate-bvn", "--rho", "1.0", "--rows", "4", "--cols", "4"])
    assert code == 0
    grid = [[float(x) for x in line.split(",")] for line in out.splitlines()]
    assert np.array_equal(grid, np.diag([0.25] * 4))
    assert out.splitlines()[0] == "0.2500,0.0000,0.0000,0.0000"


def test_generate_round_trip(tmp_path):
    code, out = run(["generate-bvn", "--rho", "-0.6", "--rows", "3", "--cols", "5", "--full-precision"])
    path = tmp_path / "g.csv"
    path.write_text(out)
    loaded = read_table(path)
    direct = discretize(BvnSpec.uniform(-0.6, 3, 5))
    for spec in (make_power(0.6), make_theta(0.3)):
        for variant in ("v1", "v2", "v3"):
            assert abs(measure(spec, loaded, variant).value - measure(spec, direct, variant).value) < 1e-9


def test_coverage_json():
    argv = ["coverage", "--rho", "0.4", "--dims", "4x4", "--divergence", "power:0.0", "--variant", "v1",
            "--n", "5000", "--iters", "3000", "--level", "0.95", "--seed", "9"]
    code, out = run(argv)
    assert code == 0
    rec = json.loads(out)
    assert rec["iterations"] == 3000 and 0.9 < rec["coverage"] < 1.0
    assert run(argv + ["--workers", "2"])[1] == out


def test_module_entry_point(white_csv):
    proc = subprocess.run([sys.executable, "-m", "fassoc", "measure", white_csv], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "0.068 0.008 (0.052, 0.083)"
