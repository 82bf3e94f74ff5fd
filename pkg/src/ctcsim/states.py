"""Dense complex linear algebra for 1-3 qubit states.

State vectors and density operators are immutable wrappers around numpy
arrays with their physical invariants (normalization, Hermiticity, unit
trace, positivity) enforced at construction. Qubit ordering follows the
ket convention: the leftmost symbol in |ab...> is qubit 0 and carries the
most significant bit of the basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import serialize

ATOL = 1e-12
PSD_FLOOR = -1e-10

#: Sentinel for :func:`measure_projective`: return the whole outcome
#: distribution instead of sampling a single outcome.
DETERMINISTIC_REPORT = "deterministic-report"


def _as_complex(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("amplitudes must be finite (no NaN/Inf)")
    return arr


def _qubit_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValueError(f"dimension must be a positive power of 2, got {dim}")
    return n


class StateVector:
    """A complex amplitude vector over 2**n basis states.

    ``normalized=False`` admits unnormalized vectors, used for the
    per-outcome branch decomposition of a measurement.
    """

    __slots__ = ("amplitudes", "dim", "normalized")

    def __init__(self, amplitudes, normalized: bool = True):
        amps = _as_complex(amplitudes).reshape(-1)
        _qubit_count(amps.size)
        if normalized:
            norm = np.linalg.norm(amps)
            if abs(norm**2 - 1.0) > 1e-9:
                raise ValueError(f"state is not normalized: |psi|^2 = {norm**2}")
            if abs(norm**2 - 1.0) > ATOL:
                amps = amps / norm
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dim", int(amps.size))
        object.__setattr__(self, "normalized", bool(normalized))

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def basis(cls, index: int, num_qubits: int = 1) -> "StateVector":
        amps = np.zeros(2**num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def qubit(cls, a: complex, b: complex) -> "StateVector":
        """Single-qubit state a|0> + b|1>."""
        return cls([a, b])

    @property
    def num_qubits(self) -> int:
        return _qubit_count(self.dim)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n < 1e-15:
            raise ValueError("cannot normalize a zero vector")
        return StateVector(self.amplitudes / n)

    def density(self) -> "DensityOperator":
        if not self.normalized:
            raise ValueError("density() requires a normalized state")
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))

    def equals_up_to_phase(self, other: "StateVector", atol: float = ATOL) -> bool:
        """Physical equality: global phase quotiented out via |<a|b>|."""
        if self.dim != other.dim:
            return False
        overlap = abs(np.vdot(self.amplitudes, other.amplitudes))
        return bool(overlap >= 1.0 - atol)

    def to_json(self) -> dict:
        return serialize.vector_to_document(self.amplitudes)

    @classmethod
    def from_json(cls, document: dict, normalized: bool = True) -> "StateVector":
        arr = serialize.document_to_array(document)
        if arr.ndim != 1:
            raise ValueError("document holds a matrix, not a vector")
        return cls(arr, normalized=normalized)

    def __repr__(self):
        return f"StateVector({np.array2string(self.amplitudes, precision=6)})"


class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix over 2**n dims."""

    __slots__ = ("matrix", "dim")

    def __init__(self, matrix):
        mat = _as_complex(matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density operator must be square, got shape {mat.shape}")
        _qubit_count(mat.shape[0])
        if not np.allclose(mat, mat.conj().T, atol=ATOL, rtol=0.0):
            raise ValueError("density operator must be Hermitian within 1e-12")
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > ATOL:
            raise ValueError(f"density operator must have unit trace, got {trace}")
        eigenvalues = np.linalg.eigvalsh(mat)
        if eigenvalues.min() < PSD_FLOOR:
            raise ValueError(
                f"density operator has negative eigenvalue {eigenvalues.min()}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dim", int(mat.shape[0]))

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityOperator":
        return state.density()

    @classmethod
    def maximally_mixed(cls, num_qubits: int = 1) -> "DensityOperator":
        dim = 2**num_qubits
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def num_qubits(self) -> int:
        return _qubit_count(self.dim)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_json(self) -> dict:
        return serialize.matrix_to_document(self.matrix)

    @classmethod
    def from_json(cls, document: dict) -> "DensityOperator":
        arr = serialize.document_to_array(document)
        if arr.ndim != 2:
            raise ValueError("document holds a vector, not a matrix")
        return cls(arr)

    def __repr__(self):
        return f"DensityOperator({np.array2string(self.matrix, precision=6)})"


class Projector:
    """Idempotent Hermitian matrix; P**2 = P within 1e-12."""

    __slots__ = ("matrix", "dim")

    def __init__(self, matrix):
        mat = _as_complex(matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"projector must be square, got shape {mat.shape}")
        if not np.allclose(mat, mat.conj().T, atol=ATOL, rtol=0.0):
            raise ValueError("projector must be Hermitian within 1e-12")
        if not np.allclose(mat @ mat, mat, atol=ATOL, rtol=0.0):
            raise ValueError("projector must be idempotent within 1e-12")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dim", int(mat.shape[0]))

    def __setattr__(self, name, value):
        raise AttributeError("Projector is immutable")

    @classmethod
    def onto(cls, state: StateVector) -> "Projector":
        amps = state.normalize().amplitudes
        return cls(np.outer(amps, amps.conj()))

    @classmethod
    def outcome(cls, subsystem: int, outcome_vector: np.ndarray, num_qubits: int) -> "Projector":
        """Rank-2**(n-1) projector |b><b| on one qubit, identity elsewhere."""
        small = np.outer(outcome_vector, np.conj(outcome_vector))
        return cls(_lift_single(small, subsystem, num_qubits))


@dataclass(frozen=True)
class MeasurementResult:
    """One measurement branch: outcome label, Born probability, post state.

    ``post_state`` is None for zero-probability branches in a
    deterministic report.
    """

    outcome: int
    probability: float
    post_state: Union[StateVector, DensityOperator, None]


QuantumState = Union[StateVector, DensityOperator]


def _lift_single(op2: np.ndarray, subsystem: int, num_qubits: int) -> np.ndarray:
    """Embed a single-qubit operator at the given qubit position."""
    if not 0 <= subsystem < num_qubits:
        raise ValueError(f"invalid subsystem index {subsystem} for {num_qubits} qubits")
    full = np.array([[1.0 + 0j]])
    for q in range(num_qubits):
        full = np.kron(full, op2 if q == subsystem else np.eye(2, dtype=complex))
    return full


def tensor_product(a: QuantumState, b: QuantumState) -> QuantumState:
    """Kronecker product; qubit order is [a's qubits, then b's qubits]."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(
            np.kron(a.amplitudes, b.amplitudes),
            normalized=a.normalized and b.normalized,
        )
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix))
    raise TypeError(
        f"operands must be the same kind, got {type(a).__name__} and {type(b).__name__}"
    )


def partial_trace(rho: DensityOperator, keep: Union[int, Sequence[int]]) -> DensityOperator:
    """Trace out all qubits except ``keep`` (an index or indices).

    Tracing a product state returns the kept factor.
    """
    n = rho.num_qubits
    keep_list = [keep] if isinstance(keep, (int, np.integer)) else sorted(keep)
    if not keep_list or any(not 0 <= q < n for q in keep_list):
        raise ValueError(f"invalid subsystem index in {keep!r} for {n} qubits")
    if len(set(keep_list)) != len(keep_list):
        raise ValueError(f"duplicate subsystem index in {keep!r}")
    tensor = rho.matrix.reshape((2,) * (2 * n))
    traced = [q for q in range(n) if q not in keep_list]
    for offset, q in enumerate(traced):
        axis = q - sum(1 for t in traced[:offset] if t < q)
        half = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + half)
    kept_dim = 2 ** len(keep_list)
    return DensityOperator(tensor.reshape(kept_dim, kept_dim))


def apply_unitary(state: QuantumState, u) -> QuantumState:
    """U|psi> for vectors, U rho U-dagger for density operators."""
    matrix = u.matrix if hasattr(u, "matrix") else np.asarray(u, dtype=complex)
    if isinstance(state, StateVector):
        if matrix.shape[1] != state.dim:
            raise ValueError(f"dimension mismatch: gate {matrix.shape} vs state dim {state.dim}")
        return StateVector(matrix @ state.amplitudes, normalized=state.normalized)
    if isinstance(state, DensityOperator):
        if matrix.shape[1] != state.dim:
            raise ValueError(f"dimension mismatch: gate {matrix.shape} vs state dim {state.dim}")
        return DensityOperator(matrix @ state.matrix @ matrix.conj().T)
    raise TypeError(f"expected StateVector or DensityOperator, got {type(state).__name__}")


def _basis_pair(basis) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a basis argument to two orthonormal single-qubit vectors."""
    if basis is None:
        return np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)
    vectors = []
    for entry in basis:
        vec = entry.amplitudes if isinstance(entry, StateVector) else _as_complex(entry).reshape(-1)
        if vec.size != 2:
            raise ValueError("measurement basis vectors must be single-qubit")
        vectors.append(vec)
    if len(vectors) != 2:
        raise ValueError("measurement basis must contain exactly two vectors")
    b0, b1 = vectors
    gram = np.array([[np.vdot(b0, b0), np.vdot(b0, b1)], [np.vdot(b1, b0), np.vdot(b1, b1)]])
    if not np.allclose(gram, np.eye(2), atol=ATOL, rtol=0.0):
        raise ValueError("measurement basis is not orthonormal within 1e-12")
    return b0, b1


def measurement_branch(state: StateVector, subsystem: int, basis_vector) -> StateVector:
    """Unnormalized remainder (<b| on one qubit applied) of a pure state.

    This is the |v_m> in the decomposition |j> = sum_m |b_m> (x) |v_m>:
    the squared norm is the outcome probability and the normalized vector
    is the post-measurement state of the untouched qubits.
    """
    n = state.num_qubits
    if not 0 <= subsystem < n:
        raise ValueError(f"invalid subsystem index {subsystem} for {n} qubits")
    vec = _as_complex(basis_vector).reshape(-1)
    tensor = state.amplitudes.reshape((2,) * n)
    contracted = np.tensordot(vec.conj(), tensor, axes=([0], [subsystem]))
    return StateVector(contracted.reshape(-1), normalized=False)


def _measurement_distribution(state, subsystem, b_pair):
    """Probabilities and full-dimension post states for both outcomes."""
    results = []
    if isinstance(state, StateVector):
        if not state.normalized:
            raise ValueError("measurement requires a normalized state")
        n = state.num_qubits
        for label, bvec in enumerate(b_pair):
            branch = measurement_branch(state, subsystem, bvec)
            prob = branch.norm() ** 2
            post = None
            if prob > 1e-15:
                rest = branch.amplitudes / np.sqrt(prob)
                if n == 1:
                    post = StateVector(bvec * rest[0])
                else:
                    tensor = np.tensordot(bvec, rest.reshape((2,) * (n - 1)), axes=0)
                    order = list(range(1, subsystem + 1)) + [0] + list(range(subsystem + 1, n))
                    post = StateVector(np.transpose(tensor, order).reshape(-1))
            results.append((label, prob, post))
        return results
    if isinstance(state, DensityOperator):
        n = state.num_qubits
        for label, bvec in enumerate(b_pair):
            proj = _lift_single(np.outer(bvec, bvec.conj()), subsystem, n)
            collapsed = proj @ state.matrix @ proj
            prob = float(np.real(np.trace(collapsed)))
            post = DensityOperator(collapsed / prob) if prob > 1e-15 else None
            results.append((label, max(prob, 0.0), post))
        return results
    raise TypeError(f"expected StateVector or DensityOperator, got {type(state).__name__}")


def measure_projective(
    state: QuantumState,
    subsystem: int,
    basis=None,
    rng_seed: Union[int, str] = DETERMINISTIC_REPORT,
    outcome: Union[int, None] = None,
):
    """Projective measurement of one qubit in an orthonormal basis pair.

    With ``rng_seed=DETERMINISTIC_REPORT`` the full Born distribution is
    returned as a list of :class:`MeasurementResult`, one per outcome.
    With an integer seed a single outcome is sampled reproducibly. With
    ``outcome=m`` the branch m is selected; requesting a branch of (near)
    zero probability raises.
    """
    b_pair = _basis_pair(basis)
    distribution = _measurement_distribution(state, subsystem, b_pair)
    if outcome is not None:
        label, prob, post = distribution[outcome]
        if post is None:
            raise ValueError(f"outcome {outcome} has probability {prob}: no post-state exists")
        return MeasurementResult(label, prob, post)
    if rng_seed == DETERMINISTIC_REPORT:
        return [MeasurementResult(label, prob, post) for label, prob, post in distribution]
    rng = np.random.default_rng(rng_seed)
    probs = np.array([prob for _, prob, _ in distribution])
    label = int(rng.choice(len(distribution), p=probs / probs.sum()))
    _, prob, post = distribution[label]
    return MeasurementResult(label, prob, post)


def trace_distance(r1: DensityOperator, r2: DensityOperator) -> float:
    """Half the trace norm of the difference; 0 iff the operators are equal."""
    if r1.dim != r2.dim:
        raise ValueError(f"dimension mismatch: {r1.dim} vs {r2.dim}")
    eigenvalues = np.linalg.eigvalsh(r1.matrix - r2.matrix)
    return float(0.5 * np.abs(eigenvalues).sum())


def purity(rho: DensityOperator) -> float:
    """Tr(rho^2); equals 1 iff the state is pure."""
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Uhlmann fidelity, as a probability in [0, 1].

    Pure/pure reduces to |<a|b>|^2 and pure/mixed to <a|rho|a>.
    """
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))
    if isinstance(a, StateVector):
        a, b = b, a
    if isinstance(b, StateVector):
        val = np.real(np.vdot(b.amplitudes, a.matrix @ b.amplitudes))
        return float(min(1.0, max(0.0, val)))
    evals, vecs = np.linalg.eigh(a.matrix)
    sqrt_a = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    inner = sqrt_a @ b.matrix @ sqrt_a
    root_sum = np.sqrt(np.clip(np.linalg.eigvalsh(inner), 0.0, None)).sum()
    return float(min(1.0, root_sum**2))
