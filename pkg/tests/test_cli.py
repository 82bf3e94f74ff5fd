import json
import subprocess
import sys

import numpy as np
import pytest

from ctcsim import cli
from ctcsim.gates import hadamard
from ctcsim.serialize import save_array


def run_cli(args, env=None):
    import os

    merged = dict(os.environ)
    if env:
        merged.update(env)
    return subprocess.run(
        [sys.executable, "-m", "ctcsim.cli", *args],
        capture_output=True,
        env=merged,
    )


def run_main(capsys, args):
    code = cli.main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ------------------------------------------------------------ canonical json


def test_canonical_json_sorts_keys():
    assert cli.canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_canonical_json_float_formatting():
    assert cli.canonical_json(1 / 3) == "0.333333333333333"
    assert cli.canonical_json(1.0) == "1"
    assert cli.canonical_json(-0.0) == "0"
    assert cli.canonical_json(1e-13) == "1e-13"


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        cli.canonical_json(float("nan"))


def test_canonical_json_nesting():
    doc = {"list": [True, None, "x"], "n": 5}
    assert cli.canonical_json(doc) == '{"list":[true,null,"x"],"n":5}'


# ------------------------------------------------------------- reproducibility


@pytest.mark.parametrize(
    "args",
    [
        ["run-protocol", "--state", "0.6,0,0.8,0", "--seed", "7"],
        ["run-protocol", "--scenario", "self_signal", "--bob-measures", "--seed", "3"],
        ["fixed-point", "--unitary", "controlled_rotation", "--state", "0.6,0,0.8,0"],
        ["beam", "--trials", "40", "--seed", "11"],
        ["teleport-baseline", "--state", "0.6,0,0,0.8", "--seed", "2"],
        ["topology-check", "--copies", "3"],
        ["resources", "--seed", "5"],
    ],
)
def test_identical_invocations_are_byte_identical(args):
    first = run_cli(args)
    second = run_cli(args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.endswith(b"\n")


def test_report_is_valid_json_with_schema_version(capsys):
    code, out, _ = run_main(capsys, ["run-protocol", "--seed", "1"])
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == "1"
    assert doc["seed"] == 1
    assert doc["command"][0] == "run-protocol"
    assert "wall_time_ms" not in doc


# ------------------------------------------------------------------ exit codes


def test_nominal_exits_zero(capsys):
    code, out, _ = run_main(capsys, ["run-protocol", "--seed", "0"])
    assert code == 0
    assert json.loads(out)["results"]["collapse_flag"] is False


def test_expected_collapse_exits_zero(capsys):
    code, out, _ = run_main(capsys, ["run-protocol", "--scenario", "bob_skips"])
    assert code == 0
    assert json.loads(out)["results"]["collapse_flag"] is True


def test_unexpected_collapse_exits_nonzero(capsys):
    code, out, _ = run_main(capsys, ["run-protocol", "--unitary", "cnot"])
    assert code == cli.EXIT_UNEXPECTED_COLLAPSE
    assert json.loads(out)["results"]["collapse_flag"] is True


def test_unknown_subcommand_usage_error():
    result = run_cli(["frobnicate"])
    assert result.returncode == 2
    assert b"usage" in result.stderr.lower()


def test_unknown_flag_usage_error():
    result = run_cli(["beam", "--frobnicate", "1"])
    assert result.returncode == 2


def test_invalid_state_is_descriptive(capsys):
    code, _, err = run_main(capsys, ["run-protocol", "--state", "1,0,1"])
    assert code == cli.EXIT_ERROR
    assert "a_re,a_im,b_re,b_im" in err


def test_unnormalized_state_is_descriptive(capsys):
    code, _, err = run_main(capsys, ["run-protocol", "--state", "1,0,1,0"])
    assert code == cli.EXIT_ERROR
    assert "not normalized" in err


def test_missing_state_file(capsys):
    code, _, err = run_main(capsys, ["run-protocol", "--state", "/does/not/exist.json"])
    assert code == cli.EXIT_ERROR
    assert "not found" in err


# ------------------------------------------------------------------ file inputs


def test_state_and_unitary_files(tmp_path, capsys):
    state_path = tmp_path / "state.json"
    save_array(state_path, np.array([0.6, 0.8j]))
    gate_path = tmp_path / "gate.json"
    save_array(gate_path, hadamard().matrix)
    code, out, _ = run_main(
        capsys,
        ["classify-consistency", "--state", str(state_path), "--unitary", "swap"],
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["weak"]["pass"] is True
    # a 2x2 file gate is rejected for the 2-qubit protocol with a clear error
    code, _, err = run_main(capsys, ["run-protocol", "--unitary", str(gate_path)])
    assert code == cli.EXIT_ERROR
    assert "2 qubits" in err


def test_fixed_point_accepts_density_matrix_file(tmp_path, capsys):
    rho_path = tmp_path / "rho.json"
    save_array(rho_path, np.diag([0.75, 0.25]).astype(complex))
    code, out, _ = run_main(
        capsys, ["fixed-point", "--unitary", "swap", "--state", str(rho_path)]
    )
    assert code == 0
    doc = json.loads(out)
    rho = doc["results"]["spectral"]["rho"]["data"]
    assert rho[0][0] == pytest.approx(0.75)


def test_topology_check_space_file(tmp_path, capsys):
    from ctcsim.topology import build_line_splitting

    path = tmp_path / "space.json"
    path.write_text(json.dumps(build_line_splitting(2).to_json()))
    code, out, _ = run_main(capsys, ["topology-check", "--space", str(path)])
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["hausdorff"] is False
    assert doc["results"]["witness"] == ["0_1", "0_2"]


def test_topology_check_needs_exactly_one_source(capsys):
    code, _, err = run_main(capsys, ["topology-check"])
    assert code == cli.EXIT_ERROR
    assert "exactly one" in err


def test_config_file(tmp_path, capsys):
    config = {
        "input_state": {"dim": 2, "data": [[0.6, 0.0], [0.8, 0.0]]},
        "scenario": "storage",
        "seed": 9,
        "storage_cycles": 2,
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    code, out, _ = run_main(capsys, ["run-protocol", "--config", str(path)])
    assert code == 0
    doc = json.loads(out)
    assert doc["seed"] == 9
    assert doc["results"]["detail"]["scenario"] == "storage"


def test_config_and_seed_conflict(tmp_path, capsys):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"input_state": {"dim": 2, "data": [[1, 0], [0, 0]]}}))
    code, _, err = run_main(capsys, ["run-protocol", "--config", str(path), "--seed", "1"])
    assert code == cli.EXIT_ERROR
    assert "mutually exclusive" in err


# ------------------------------------------------------------------------- env


def test_env_seed_default():
    with_env = run_cli(["beam", "--trials", "10"], env={"CTC_SIM_SEED": "123"})
    explicit = run_cli(["beam", "--trials", "10", "--seed", "123"])
    a = json.loads(with_env.stdout)["results"]
    b = json.loads(explicit.stdout)["results"]
    assert a == b


# ------------------------------------------------------------------------- csv


def test_beam_csv_one_row_per_trial(capsys):
    code, out, _ = run_main(capsys, ["beam", "--trials", "12", "--seed", "4", "--output", "csv"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "trial,prep_basis,meas_basis,outcome,matched,action"
    assert len(lines) == 13


def test_flat_csv_for_other_commands(capsys):
    code, out, _ = run_main(
        capsys, ["fixed-point", "--unitary", "swap", "--state", "1,0,0,0", "--output", "csv"]
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "key,value"
    assert any(line.startswith("results.spectral.residual,") for line in lines)


# ------------------------------------------------------- classify and scan


def test_classify_consistency_verdicts(capsys):
    code, out, _ = run_main(
        capsys,
        ["classify-consistency", "--unitary", "swap", "--state", "1,0,0,0", "--ctc", "1,0,0,0"],
    )
    assert code == 0
    results = json.loads(out)["results"]
    assert results["strong"]["pass"] is True
    assert results["deutsch"]["pass"] is True
    assert results["weak"]["pass"] is True


def test_classify_with_grid_scan(capsys):
    code, out, _ = run_main(
        capsys,
        [
            "classify-consistency",
            "--unitary", "swap",
            "--state", "0.6,0,0.8,0",
            "--ctc", "1,0,0,0",
            "--grid", "8",
        ],
    )
    assert code == 0
    scan = json.loads(out)["results"]["admissible_scan"]
    assert scan["grid_resolution"] == 8
    assert scan["admissible_count"] == 1


def test_parse_and_dispatch_returns_report():
    report = cli.parse_and_dispatch(["fixed-point", "--unitary", "swap", "--state", "1,0,0,0"])
    assert report.schema_version == "1"
    assert report.results["methods_agree"] is True
    assert report.wall_time_ms >= 0.0
    # the swap coupling pins the CTC state to the coupled input |0><0|
    assert report.results["spectral"]["rho"]["data"] == [[1, 0], [0, 0], [0, 0], [0, 0]]
