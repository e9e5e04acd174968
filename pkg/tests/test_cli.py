import csv
import io
import json
from pathlib import Path

import numpy as np
import pytest

from subqchem.cli import EXIT_INVALID, EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, main

GOLDEN = Path(__file__).parent / "golden" / "prep_prob_2_12.csv"


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cell_file(tmp_path):
    def write(doc, name="cell.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
        return str(p)

    return write


H_CELL = {"eta": 1, "n_p": 2, "omega": 50.0, "nuclei": [{"zeta": 1, "r": [0.13, 0.37, 0.71]}]}
HE_CELL = {"eta": 2, "n_p": 2, "omega": 50.0, "nuclei": [{"zeta": 2, "r": [0.1, 0.2, 0.3]}]}


def test_unknown_subcommand():
    code, _, err = run(["frobnicate"])
    assert code == EXIT_USAGE
    assert "usage" in err


def test_missing_subcommand():
    assert run([])[0] == EXIT_USAGE


def test_bad_option_is_invalid_input():
    assert run(["prep-prob", "--n-max", "many"])[0] == EXIT_INVALID


def test_prep_prob_rows():
    code, out, err = run(["prep-prob", "--n-max", "12"])
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "P_n", "amplified_failure"]
    assert [int(r[0]) for r in rows[1:]] == list(range(2, 13))
    manifest = json.loads(err.strip().splitlines()[-1])
    assert manifest["command"] == "prep-prob"
    assert len(manifest["config_hash"]) == 64


def test_prep_prob_matches_golden(tmp_path):
    target = tmp_path / "p.csv"
    assert run(["prep-prob", "--n-max", "12", "--out", str(target)])[0] == EXIT_OK
    assert target.read_bytes() == GOLDEN.read_bytes()


def test_prep_prob_finite_M():
    code, out, _ = run(["prep-prob", "--n-max", "4", "--M", "64"])
    assert code == EXIT_OK
    assert out.splitlines()[0] == "n,P_n,amplified_failure,P_n_M"
    assert run(["prep-prob", "--M", "12"])[0] == EXIT_INVALID
    assert run(["prep-prob", "--n-min", "5", "--n-max", "3"])[0] == EXIT_INVALID


def test_lcu_check_two_electrons(cell_file):
    code, out, _ = run(["lcu-check", "--cell", cell_file(HE_CELL)])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["max_residual"] <= 1e-10
    assert doc["dimension"] == 729
    assert doc["lambda"] == pytest.approx(doc["lambda_U"] + doc["lambda_V"])


def test_lcu_check_tolerance_breach(cell_file):
    assert run(["lcu-check", "--cell", cell_file(H_CELL), "--tol", "0"])[0] in (EXIT_OK, EXIT_TOLERANCE)
    assert run(["lcu-check", "--cell", cell_file(H_CELL), "--tol", "-1"])[0] == EXIT_TOLERANCE


def test_malformed_json(cell_file):
    path = cell_file('{"eta": 1,\n "n_p": 2,\n "omega": }')
    code, out, err = run(["lcu-check", "--cell", path])
    assert code == EXIT_INVALID
    assert out == ""
    assert "line 3" in err and "column" in err


@pytest.mark.parametrize(
    "doc",
    [
        {"eta": 0, "n_p": 2, "omega": 1.0, "nuclei": []},
        {"eta": 1, "n_p": 2, "omega": -1.0, "nuclei": []},
        {"eta": 1, "omega": 1.0, "nuclei": []},
    ],
)
def test_invalid_cell(cell_file, doc):
    assert run(["lcu-check", "--cell", cell_file(doc)])[0] == EXIT_INVALID


def test_missing_file(tmp_path):
    assert run(["lcu-check", "--cell", str(tmp_path / "nope.json")])[0] == EXIT_INVALID


def test_evolve_check(cell_file, tmp_path):
    out_path = tmp_path / "psi.csv"
    argv = ["evolve", "--cell", cell_file(H_CELL), "--time", "1.0", "--epsilon", "1e-6",
            "--state-index", "13", "--check", "--out", str(out_path)]
    code, _, err = run(argv)
    assert code == EXIT_OK
    manifest = json.loads(err.strip().splitlines()[-1])
    assert manifest["measured_error"] <= 1e-6
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == ["index", "re", "im"]
    amp = np.array([complex(float(r[1]), float(r[2])) for r in rows[1:]])
    assert len(amp) == 27
    assert np.linalg.norm(amp) == pytest.approx(1.0, abs=1e-6)


def test_evolve_state_tuple_antisymmetrized(cell_file):
    code, out, _ = run(["evolve", "--cell", cell_file(HE_CELL), "--time", "0.0",
                        "--state-tuple", "0,0,0;1,0,0"])
    assert code == EXIT_OK
    amp = {int(r[0]): float(r[1]) for r in list(csv.reader(io.StringIO(out)))[1:] if float(r[1])}
    assert len(amp) == 2
    assert sorted(amp.values()) == pytest.approx([-2**-0.5, 2**-0.5])


@pytest.mark.parametrize(
    "extra",
    [["--state-index", "27"], ["--state-tuple", "0,0,0;0,0,0"], ["--state-tuple", "0,0"],
     ["--state-index", "0", "--epsilon", "2"]],
)
def test_evolve_bad_state(cell_file, extra):
    doc = HE_CELL if "--state-tuple" in extra and extra[1].count(";") else H_CELL
    assert run(["evolve", "--cell", cell_file(doc), "--time", "0.1", *extra])[0] == EXIT_INVALID


def test_estimate_json():
    code, out, _ = run(["estimate", "--eta", "54", "--n-orbitals", "1e6", "--nuclei", "8"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert 3e6 <= doc["interaction_picture_powerlaw"] <= 5e6
    assert 5e14 <= doc["comparison_second_quantized"] <= 9e14


def test_estimate_rejects_nuclei():
    code, _, err = run(["estimate", "--eta", "2", "--n-orbitals", "100", "--nuclei", "5"])
    assert code == EXIT_INVALID
    assert "L = 5" in err


def test_estimate_sweep():
    code, out, _ = run(["estimate", "--eta", "10", "--n-orbitals", "1000", "--csv-sweep", "time=1,2,4"])
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["time"]) for r in rows] == [1.0, 2.0, 4.0]
    gates = [float(r["total_gates"]) for r in rows]
    assert gates == sorted(gates)
    assert run(["estimate", "--eta", "10", "--n-orbitals", "1000", "--csv-sweep", "bogus=1"])[0] == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [["prep-prob", "--n-max", "9", "--M", "256"],
     ["estimate", "--eta", "7", "--n-orbitals", "5000", "--csv-sweep", "eta=2,3,5"]],
)
def test_byte_identical(argv):
    assert run(argv)[1] == run(argv)[1]


def test_config_hash_stable_and_sensitive():
    h = lambda argv: json.loads(run(argv)[2].strip().splitlines()[-1])["config_hash"]
    assert h(["prep-prob", "--n-max", "4"]) == h(["prep-prob", "--n-max", "4"])
    assert h(["prep-prob", "--n-max", "4"]) != h(["prep-prob", "--n-max", "5"])
