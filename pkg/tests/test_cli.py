import json

import pytest

from app.core.errors import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK
from app.main import main
from app.rumin.verify import CHECKS
from app.schemas.report import CheckResult


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def write_current(tmp_path, coefficients):
    document = {
        "algebra": "heisenberg(1)",
        "grid": {"box": [["-2", "2"], ["-2", "2"], ["-2", "2"]], "h": "1"},
        "dimension": 1,
        "coefficients": coefficients,
    }
    path = tmp_path / "current.json"
    path.write_text(json.dumps(document))
    return str(path)


# ==================== complex ====================

def test_complex_heisenberg(capsys):
    code, report = run_json(capsys, "complex", "heisenberg(1)")
    assert code == EXIT_OK
    assert report["Q"] == 4
    assert report["delta"] == 2
    assert [d["dim"] for d in report["degrees"]] == [1, 2, 2, 1]
    assert [d["weights"] for d in report["degrees"]] == [[0], [1], [3], [4]]
    assert [d["dc_orders"] for d in report["degrees"]] == [[1], [2], [1], []]


def test_complex_engel(capsys):
    code, report = run_json(capsys, "complex", "--algebra", "engel")
    assert code == EXIT_OK
    assert report["Q"] == 7
    assert report["delta"] == 3
    assert [d["weights"] for d in report["degrees"]] == [[0], [1], [3, 4], [6], [7]]


def test_complex_abelian_plane(capsys):
    code, report = run_json(capsys, "complex", "abelian(2)")
    assert code == EXIT_OK
    assert [d["dim"] for d in report["degrees"]] == [1, 2, 1]
    assert [d["dc_orders"] for d in report["degrees"]] == [[1], [1], []]


def test_complex_pretty_and_csv(capsys):
    assert main(["complex", "heisenberg(1)"]) == EXIT_OK
    pretty = capsys.readouterr().out
    assert pretty.startswith("heisenberg(1): dim 3, step 2, Q = 4, delta = 2")
    assert main(["complex", "heisenberg(1)", "--format", "csv"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("degree,dim,weights")
    assert len(lines) == 5


def test_complex_report_carries_the_checks(capsys):
    _, report = run_json(capsys, "complex", "heisenberg(1)")
    assert report["checks"]["dc_squared"] is True
    assert report["checks"]["delta_bound"] is True
    assert report["checks"]["abelian_degeneration"] is None
    assert all(passed in (True, None) for passed in report["checks"].values())
    _, line = run_json(capsys, "complex", "abelian(1)")
    assert line["checks"]["delta_bound"] is None
    assert line["checks"]["abelian_degeneration"] is True


def test_unknown_algebra_is_an_input_error(capsys):
    assert main(["complex", "lorentz(4)"]) == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_algebra_given_twice(capsys):
    assert main(["complex", "engel", "--algebra", "heisenberg(1)"]) == EXIT_INPUT_ERROR


# ==================== verify ====================

def test_verify_passes(capsys):
    code, report = run_json(capsys, "verify", "heisenberg(1)")
    assert code == EXIT_OK
    assert report["passed"] is True
    assert all(check["passed"] in (True, None) for check in report["checks"])


def test_verify_line_skips_the_weight_gap_bound(capsys):
    code, report = run_json(capsys, "verify", "abelian(1)")
    assert code == EXIT_OK
    flags = {check["name"]: check["passed"] for check in report["checks"]}
    assert flags["delta_bound"] is None
    assert all(passed in (True, None) for passed in flags.values())


def test_failed_check_exits_with_one(capsys, monkeypatch):
    def failing(rc):
        return CheckResult(name="dc_squared", passed=False, offending=["d_c^1 d_c^0"])

    monkeypatch.setitem(CHECKS, "dc_squared", failing)
    assert main(["verify", "heisenberg(1)", "--only", "dc_squared", "--format", "json"]) == EXIT_CHECK_FAILED
    captured = capsys.readouterr()
    assert json.loads(captured.out)["passed"] is False
    assert "1 check(s) failed: dc_squared" in captured.err


def test_verify_broken_algebra(tmp_path, capsys):
    document = {
        "name": "broken",
        "layer_dims": [2, 1, 1],
        "brackets": [
            {"i": 1, "j": 2, "coeffs": {"3": "1"}},
            {"i": 1, "j": 3, "coeffs": {"4": "1"}},
            {"i": 1, "j": 4, "coeffs": {"4": "1"}},
            {"i": 2, "j": 4, "coeffs": {"3": "1"}},
        ],
    }
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(document))
    code = main(["verify", str(path)])
    assert code != EXIT_OK
    assert "jacobi" in capsys.readouterr().err


def test_malformed_algebra_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert main(["verify", str(path)]) == EXIT_INPUT_ERROR


# ==================== flatnorm ====================

def test_flatnorm_sample_current(capsys, data_dir):
    code, report = run_json(capsys, "flatnorm", str(data_dir / "heisenberg_sample_current.json"), "--mode", "exact")
    assert code == EXIT_OK
    assert report["mass"] == "23/6"
    assert report["flat_primal"] == report["flat_dual"]
    assert report["gap"] == "0"
    assert report["witness"]["support_S"] >= 0


def test_flatnorm_float_mode(capsys, data_dir):
    code, report = run_json(capsys, "flatnorm", str(data_dir / "heisenberg_sample_current.json"), "--mode", "float")
    assert code == EXIT_OK
    assert float(report["mass"]) == pytest.approx(23 / 6)
    assert float(report["flat_primal"]) == pytest.approx(float(report["flat_dual"]), abs=1e-7)


def test_flatnorm_zero_current(tmp_path, capsys):
    code, report = run_json(capsys, "flatnorm", write_current(tmp_path, []), "--mode", "exact")
    assert code == EXIT_OK
    assert (report["mass"], report["normal_mass"], report["flat_primal"]) == ("0", "0", "0")


def test_flatnorm_on_the_boundary_face(tmp_path, capsys):
    path = write_current(tmp_path, [{"point": [0, 0, 0], "basis": 0, "value": "1"}])
    assert main(["flatnorm", path, "--mode", "exact"]) == EXIT_INPUT_ERROR
    assert "error:" in capsys.readouterr().err


def test_flatnorm_schema_error(tmp_path, capsys):
    path = write_current(tmp_path, [{"point": [2, 2, 2], "basis": 0}])
    assert main(["flatnorm", path]) == EXIT_INPUT_ERROR
    assert "schema" in capsys.readouterr().err


# ==================== compactness ====================

def test_compactness_is_deterministic(capsys, data_dir):
    argv = [
        "compactness", "--params", str(data_dir / "compactness_reference_params.json"),
        "--samples", "3", "--levels", "1", "--mode", "float", "--seed", "11",
    ]
    first_code, first = run_json(capsys, *argv)
    second_code, second = run_json(capsys, *argv)
    assert first_code == second_code == EXIT_OK
    assert first == second
    assert first["seed"] == 11
    assert first["samples"] == 3
    assert len(first["levels"]) == 1
    assert "runtime_ms" not in first["levels"][0]


def test_compactness_budget(capsys, data_dir):
    argv = ["compactness", "--params", str(data_dir / "compactness_reference_params.json"), "--samples", "100000"]
    assert main(argv) == EXIT_INPUT_ERROR


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT_ERROR}) == 3
