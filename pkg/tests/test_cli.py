import csv
import io
import json
import math
import subprocess
import sys

import pytest

from aimwell.cli import EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, SPECTRUM_KEYS, main

FLAT = ["--A", "0", "--B", "0", "--C", "0", "--L", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_square_well_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", *FLAT, "--k", "3", "--nmax", "60", "--grid", "300", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert set(doc) >= {"settings", "results", "warnings"}
    assert doc["settings"]["n_max"] == 60 and doc["settings"]["precision"] == 30
    for i, row in enumerate(doc["results"]):
        assert tuple(row) == SPECTRUM_KEYS
        assert row["index"] == i and row["converged"] is True
        assert math.isclose(row["energy"], math.pi ** 2 / 8 * (i + 1) ** 2, rel_tol=1e-8)


def test_spectrum_csv_has_twelve_digits(capsys):
    code, out, _ = run(capsys, "spectrum", *FLAT, "--k", "2", "--nmax", "60", "--grid", "300", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == SPECTRUM_KEYS
    energy = rows[1][1]
    assert len(energy.replace(".", "")) == 12
    assert math.isclose(float(energy), math.pi ** 2 / 8, rel_tol=1e-8)


def test_spectrum_text(capsys):
    code, out, _ = run(capsys, "spectrum", "--k", "2", "--nmax", "60", "--grid", "400")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].split()[:2] == ["index", "energy"]
    assert lines[1].split()[1].startswith("5.97276")


def test_non_convergent_formulation_is_partial(capsys):
    code, out, _ = run(capsys, "spectrum", "--k", "2", "--nmax", "60", "--grid", "400",
                       "--formulation", "plain", "--format", "json")
    assert code == EXIT_PARTIAL
    assert "not stable under N -> N-1 at tol" in json.loads(out)["warnings"]


def test_supercritical_default_window_warns(capsys):
    code, out, _ = run(capsys, "spectrum", "--A", "-4", "--B", "-4", "--C", "-8", "--k", "2",
                       "--nmax", "60", "--grid", "300", "--format", "json")
    doc = json.loads(out)
    assert any(w.startswith("supercritical coupling") for w in doc["warnings"])
    assert "supercritical: regularization-dependent" in doc["warnings"]
    assert doc["settings"]["e_min"] == -10.0


@pytest.mark.parametrize("argv", [
    ["spectrum", "--L", "-1"],
    ["spectrum", "--k", "0"],
    ["spectrum", "--precision", "8"],
    ["spectrum", "--y0", "1.5"],
    ["nosuchcommand"],
    ["spectrum", "--format", "xml"],
    ["potential", "--xmin", "3"],
    ["oracle", "--grids", "256,128"],
    ["oracle", "--grids", "a,b"],
    ["plateau", "--y0range", "0.3"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_precision_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("AIM_PRECISION", "40")
    code, out, _ = run(capsys, "spectrum", *FLAT, "--k", "1", "--nmax", "40", "--grid", "200", "--format", "json")
    assert code == EXIT_OK and json.loads(out)["settings"]["precision"] == 40
    monkeypatch.setenv("AIM_PRECISION", "many")
    assert run(capsys, "spectrum", "--k", "1")[0] == EXIT_USAGE


def test_potential_samples(capsys):
    code, out, _ = run(capsys, "potential", "--samples", "5", "--xmin", "1", "--xmax", "1.5")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5
    assert math.isclose(float(rows[0]["V"]), 32 / 9, rel_tol=1e-11)


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", *FLAT, "--grids", "256,512,1024", "--k", "2", "--extrapolate",
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["settings"]["grids"] == [256, 512, 1024]
    first = doc["results"][0]
    assert set(first) == {"index", "M256", "M512", "M1024", "extrapolated", "order", "cutoff_sensitivity"}
    assert math.isclose(first["extrapolated"], math.pi ** 2 / 8, rel_tol=1e-8)


def test_plateau_command(capsys):
    code, out, _ = run(capsys, "plateau", "--y0range", "-0.3:0.3", "--samples", "3", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["summary"]["plateau_range"] == [-0.3, 0.3]
    assert doc["summary"]["missing_samples"] == 0
    assert all(abs(r["energy"] - 5.9727609687) < 1e-8 for r in doc["results"])


def test_wavefunction_command(capsys):
    code, out, _ = run(capsys, "wavefunction", *FLAT, "--state", "1", "--nmax", "60", "--grid", "300",
                       "--samples", "9", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["summary"]["nodes"] == 1
    for r in doc["results"]:
        assert abs(r["psi"] - math.sin(math.pi * r["x"])) < 1e-4


def test_wavefunction_unavailable_for_supercritical(capsys):
    code, _, err = run(capsys, "wavefunction", "--A", "-4", "--B", "-4", "--C", "-8", "--nmax", "60", "--grid", "300")
    assert code == 1 and "unavailable" in err


def test_tables_group_one(capsys):
    code, out, _ = run(capsys, "tables", "--which", "1", "--format", "json")
    doc = json.loads(out)
    assert doc["summary"] == {"judged": 20, "passed": 20}
    assert code == EXIT_OK
    assert {r["table"] for r in doc["results"]} == {"table1", "table1tra"}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aimwell", "potential", "--samples", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "x,V"
