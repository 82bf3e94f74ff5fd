import json

import numpy as np
import pytest

from ctcsim.gates import (
    GateSpec,
    UnitaryGate,
    bell_pair,
    build_gate,
    cnot,
    controlled_phase,
    controlled_rotation,
    embed,
    hadamard,
    identity,
    pauli_x,
    pauli_z,
    swap,
)
from ctcsim.states import StateVector, apply_unitary, partial_trace, tensor_product

NAMED = [swap, controlled_rotation, controlled_phase, hadamard, pauli_x, pauli_z, cnot, identity]


@pytest.mark.parametrize("factory", NAMED)
def test_named_gates_are_unitary(factory):
    gate = factory()
    assert np.allclose(gate.matrix.conj().T @ gate.matrix, np.eye(gate.dim), atol=1e-12)


def test_unitary_gate_rejects_non_unitary():
    with pytest.raises(ValueError):
        UnitaryGate([[1, 1], [0, 1]])


def test_swap_action():
    joint = tensor_product(StateVector.qubit(0.6, 0.8), StateVector.basis(0))
    out = apply_unitary(joint, swap())
    assert np.allclose(out.amplitudes, [0.6, 0.8, 0.0, 0.0])


def test_swap_squared_is_identity():
    assert np.allclose(swap().matrix @ swap().matrix, np.eye(4), atol=1e-12)


def test_controlled_rotation_diagonal():
    gate = controlled_rotation()
    assert np.allclose(np.diag(gate.matrix), [1, 1, 1, 1j])
    out = apply_unitary(StateVector.basis(1, num_qubits=2), gate)
    assert np.allclose(out.amplitudes, [0, 1, 0, 0])


def test_controlled_rotation_fourth_power_is_identity():
    m = controlled_rotation().matrix
    assert np.allclose(np.linalg.matrix_power(m, 4), np.eye(4), atol=1e-12)


def test_controlled_phase_default_is_cz():
    assert np.allclose(controlled_phase().matrix, np.diag([1, 1, 1, -1]))


def test_build_gate_dispatch():
    for name in ("swap", "controlled_rotation", "hadamard", "pauli_x", "pauli_z", "cnot", "identity"):
        gate = build_gate(GateSpec(name))
        assert gate.label == name


def test_gate_spec_rejects_unknown_name():
    with pytest.raises(ValueError):
        GateSpec("toffoli")


def test_gate_spec_rejects_angle_on_fixed_gate():
    with pytest.raises(ValueError):
        GateSpec("swap", params=0.5)


def test_custom_gate_round_trip(tmp_path):
    path = tmp_path / "gate.json"
    path.write_text(json.dumps(hadamard().to_json()))
    gate = build_gate(GateSpec("custom", custom_path=path))
    assert np.allclose(gate.matrix, hadamard().matrix)


def test_custom_gate_rejects_non_unitary(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 2, "data": [[1, 0], [1, 0], [0, 0], [1, 0]]}))
    with pytest.raises(ValueError):
        build_gate(GateSpec("custom", custom_path=path))


def test_bell_pair_amplitudes():
    pair = bell_pair()
    assert np.allclose(pair.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert pair.norm() == pytest.approx(1.0, abs=1e-12)


def test_bell_pair_reduced_state_is_maximally_mixed():
    reduced = partial_trace(bell_pair().density(), keep=1)
    assert np.allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)


def test_embed_matches_kron_oracle():
    assert np.allclose(embed(pauli_x(), [1], 2).matrix, np.kron(np.eye(2), pauli_x().matrix))
    assert np.allclose(embed(pauli_x(), [0], 2).matrix, np.kron(pauli_x().matrix, np.eye(2)))
    assert np.allclose(embed(cnot(), [0, 1], 3).matrix, np.kron(cnot().matrix, np.eye(2)))


def test_embed_nonadjacent_targets():
    # control on qubit 0, target on qubit 2: |100> -> |101>, |101> -> |100>
    gate = embed(cnot(), [0, 2], 3)
    state = apply_unitary(StateVector.basis(0b100, num_qubits=3), gate)
    assert np.allclose(state.amplitudes, np.eye(8)[0b101])
    state = apply_unitary(StateVector.basis(0b001, num_qubits=3), gate)
    assert np.allclose(state.amplitudes, np.eye(8)[0b001])


def test_embed_rejects_bad_targets():
    with pytest.raises(ValueError):
        embed(cnot(), [0], 3)
    with pytest.raises(ValueError):
        embed(cnot(), [0, 0], 3)
    with pytest.raises(ValueError):
        embed(cnot(), [0, 4], 3)
