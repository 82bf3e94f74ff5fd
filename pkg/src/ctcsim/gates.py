"""Named unitaries for the CTC coupling and the teleportation baseline."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import serialize
from .states import ATOL, StateVector

GATE_NAMES = (
    "swap",
    "controlled_rotation",
    "controlled_phase",
    "hadamard",
    "pauli_x",
    "pauli_z",
    "cnot",
    "identity",
    "custom",
)


class UnitaryGate:
    """Square complex matrix with U-dagger U = I within 1e-12."""

    __slots__ = ("matrix", "dim", "label")

    def __init__(self, matrix, label: str = "custom"):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"gate must be square, got shape {mat.shape}")
        if not np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), atol=ATOL, rtol=0.0):
            raise ValueError(f"matrix is not unitary within 1e-12 (label {label!r})")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dim", int(mat.shape[0]))
        object.__setattr__(self, "label", str(label))

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryGate is immutable")

    @property
    def num_qubits(self) -> int:
        n = self.dim.bit_length() - 1
        if 2**n != self.dim:
            raise ValueError(f"gate dimension {self.dim} is not a power of 2")
        return n

    def dagger(self) -> "UnitaryGate":
        return UnitaryGate(self.matrix.conj().T, label=f"{self.label}_dagger")

    def to_json(self) -> dict:
        return serialize.matrix_to_document(self.matrix)

    def __repr__(self):
        return f"UnitaryGate({self.label!r}, dim={self.dim})"


@dataclass(frozen=True)
class GateSpec:
    """Recipe for a named gate; ``params`` is the controlled-phase angle."""

    name: str
    params: Optional[float] = None
    custom_path: Optional[Union[str, Path]] = None

    def __post_init__(self):
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate name {self.name!r}; expected one of {GATE_NAMES}")
        if self.name == "custom" and self.custom_path is None:
            raise ValueError("custom gates need custom_path")
        if self.params is not None and self.name != "controlled_phase":
            raise ValueError(f"gate {self.name!r} takes no angle parameter")


def swap() -> UnitaryGate:
    """Two-qubit exchange |01> <-> |10|."""
    mat = np.eye(4, dtype=complex)
    mat[[1, 2]] = mat[[2, 1]]
    return UnitaryGate(mat, label="swap")


def controlled_rotation() -> UnitaryGate:
    """diag(1, 1, 1, i): a quarter phase rotation on |11>."""
    return UnitaryGate(np.diag([1.0, 1.0, 1.0, 1.0j]), label="controlled_rotation")


def controlled_phase(theta: float = np.pi) -> UnitaryGate:
    """diag(1, 1, 1, e^{i theta}); the default angle pi gives CZ."""
    return UnitaryGate(np.diag([1.0, 1.0, 1.0, np.exp(1j * theta)]), label="controlled_phase")


def hadamard() -> UnitaryGate:
    return UnitaryGate(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2), label="hadamard")


def pauli_x() -> UnitaryGate:
    return UnitaryGate(np.array([[0, 1], [1, 0]], dtype=complex), label="pauli_x")


def pauli_z() -> UnitaryGate:
    return UnitaryGate(np.array([[1, 0], [0, -1]], dtype=complex), label="pauli_z")


def cnot() -> UnitaryGate:
    """Controlled-X with the first (most significant) qubit as control."""
    mat = np.eye(4, dtype=complex)
    mat[[2, 3]] = mat[[3, 2]]
    return UnitaryGate(mat, label="cnot")


def identity(num_qubits: int = 2) -> UnitaryGate:
    return UnitaryGate(np.eye(2**num_qubits, dtype=complex), label="identity")


def build_gate(spec: GateSpec) -> UnitaryGate:
    """Construct the gate a spec names; unitarity is validated on build."""
    if spec.name == "swap":
        return swap()
    if spec.name == "controlled_rotation":
        return controlled_rotation()
    if spec.name == "controlled_phase":
        return controlled_phase(np.pi if spec.params is None else float(spec.params))
    if spec.name == "hadamard":
        return hadamard()
    if spec.name == "pauli_x":
        return pauli_x()
    if spec.name == "pauli_z":
        return pauli_z()
    if spec.name == "cnot":
        return cnot()
    if spec.name == "identity":
        return identity()
    arr = serialize.load_array(spec.custom_path)
    if arr.ndim != 2:
        raise ValueError(f"custom gate file {spec.custom_path} holds a vector, not a matrix")
    return UnitaryGate(arr, label=f"custom:{spec.custom_path}")


def bell_pair() -> StateVector:
    """The maximally entangled pair (|00> + |11>)/sqrt(2)."""
    return StateVector(np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2))


def embed(gate: UnitaryGate, targets, num_qubits: int) -> UnitaryGate:
    """Lift a gate onto specific qubits of a larger register.

    ``targets`` lists the qubit positions (most significant first) the
    gate's own qubits act on; remaining qubits get the identity.
    """
    targets = list(targets)
    k = gate.num_qubits
    if len(targets) != k:
        raise ValueError(f"gate acts on {k} qubits but {len(targets)} targets given")
    if len(set(targets)) != k or any(not 0 <= t < num_qubits for t in targets):
        raise ValueError(f"invalid target list {targets} for {num_qubits} qubits")
    rest = [q for q in range(num_qubits) if q not in targets]
    big = np.kron(gate.matrix, np.eye(2 ** len(rest), dtype=complex))
    # big acts on qubit order [targets..., rest...]; permute to natural order
    perm = targets + rest
    inverse = [perm.index(q) for q in range(num_qubits)]
    tensor = big.reshape((2,) * (2 * num_qubits))
    tensor = np.transpose(tensor, inverse + [num_qubits + ax for ax in inverse])
    dim = 2**num_qubits
    return UnitaryGate(tensor.reshape(dim, dim), label=f"{gate.label}@{targets}")
