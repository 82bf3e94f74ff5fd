"""Checkers and solvers for the three CTC consistency conditions.

The strong condition demands the CTC qubit's wavefunction survive the
coupling untouched; the Deutsch condition only fixes its density operator
(a fixed point of the reduced coupling map); the weak condition merely
requires the state sequence around the loop to be well-ordered and cyclic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .gates import UnitaryGate
from .states import (
    DensityOperator,
    StateVector,
    apply_unitary,
    fidelity,
    partial_trace,
    tensor_product,
    trace_distance,
)

STRICT_TOL = 1e-12
SOLVER_AGREEMENT_TOL = 1e-9
MAX_ITERATIONS = 10_000

LOOP_LABELS = ("rho_in", "rho_out", "rho_in_prime", "rho_out_prime")

_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class FixedPointError(RuntimeError):
    """Solver failure; carries the last iterate and residual when known."""

    def __init__(self, message, rho=None, residual=None):
        super().__init__(message)
        self.rho = rho
        self.residual = residual


@dataclass(frozen=True)
class ConsistencyVerdict:
    condition: str
    residual: float
    passed: bool
    tolerance: float

    def __post_init__(self):
        if self.passed != (self.residual <= self.tolerance):
            raise ValueError("verdict pass flag contradicts residual vs tolerance")

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "residual": float(self.residual),
            "pass": bool(self.passed),
            "tolerance": float(self.tolerance),
        }


def _verdict(condition: str, residual: float, tolerance: float) -> ConsistencyVerdict:
    residual = float(max(residual, 0.0))
    return ConsistencyVerdict(condition, residual, residual <= tolerance, tolerance)


@dataclass(frozen=True)
class FixedPointSolution:
    """A self-consistent CTC state for one coupling.

    ``fixed_space_dim`` counts the eigenvalue-1 multiplicity of the
    vectorized map; when it exceeds 1 the solution is one of a family and
    ``fixed_space_basis`` spans the whole eigenspace (as Hermitian
    matrices).
    """

    rho: DensityOperator
    method: str
    iterations: int
    residual: float
    fixed_space_dim: int = 1
    fixed_space_basis: tuple = field(default_factory=tuple)

    @property
    def degenerate(self) -> bool:
        return self.fixed_space_dim > 1

    @property
    def note(self) -> str:
        return "one of many" if self.degenerate else "unique"

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "iterations": int(self.iterations),
            "residual": float(self.residual),
            "fixed_space_dim": int(self.fixed_space_dim),
            "note": self.note,
            "rho": self.rho.to_json(),
        }


class LoopRecord:
    """The four CTC segment states in loop order.

    Labels are fixed (rho_in, rho_out, rho_in_prime, rho_out_prime); the
    sequence may start anywhere on the loop since the closure condition
    is cyclic.
    """

    def __init__(self, segments: Sequence[tuple]):
        segments = [(str(label), rho) for label, rho in segments]
        labels = [label for label, _ in segments]
        if sorted(labels) != sorted(LOOP_LABELS):
            missing = set(LOOP_LABELS) - set(labels)
            raise ValueError(f"loop record needs segments {LOOP_LABELS}; missing {sorted(missing)}")
        for label, rho in segments:
            if not isinstance(rho, DensityOperator):
                raise TypeError(f"segment {label!r} is not a DensityOperator")
        self.segments = tuple(segments)

    @classmethod
    def from_states(cls, rho_in, rho_out, rho_in_prime, rho_out_prime) -> "LoopRecord":
        return cls(list(zip(LOOP_LABELS, (rho_in, rho_out, rho_in_prime, rho_out_prime))))

    def __getitem__(self, label: str) -> DensityOperator:
        for seg_label, rho in self.segments:
            if seg_label == label:
                return rho
        raise KeyError(label)

    def rotated(self, start: int) -> "LoopRecord":
        """Same loop, relabeled to start at another segment."""
        items = list(self.segments)
        return LoopRecord(items[start:] + items[:start])


def _require_coupling_shapes(u: UnitaryGate, *single_qubit_dims):
    if u.dim != 4:
        raise ValueError(f"coupling gate must act on 2 qubits, got dim {u.dim}")
    for dim in single_qubit_dims:
        if dim != 2:
            raise ValueError(f"expected a single-qubit state, got dim {dim}")


def deutsch_map(u: UnitaryGate, rho_in: DensityOperator, rho: DensityOperator) -> DensityOperator:
    """The reduced coupling map: trace the chronology-respecting qubit
    out of U (rho_in (x) rho) U-dagger."""
    _require_coupling_shapes(u, rho_in.dim, rho.dim)
    joint = apply_unitary(tensor_product(rho_in, rho), u)
    return partial_trace(joint, keep=1)


def _deutsch_map_raw(u_mat: np.ndarray, rho_in_mat: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """deutsch_map extended linearly to arbitrary 2x2 matrices."""
    joint = u_mat @ np.kron(rho_in_mat, mat) @ u_mat.conj().T
    tensor = joint.reshape(2, 2, 2, 2)
    return np.trace(tensor, axis1=0, axis2=2)


def check_strong(
    u: UnitaryGate, s: StateVector, ctc: StateVector, tolerance: float = STRICT_TOL
) -> ConsistencyVerdict:
    """Does U(|s> (x) |ctc>) factorize with the CTC factor unchanged?

    The residual is 1 - <ctc| rho_ctc |ctc> of the evolved reduced CTC
    state, which vanishes exactly when the joint state is a product with
    CTC factor |ctc> up to global phase.
    """
    _require_coupling_shapes(u, s.dim, ctc.dim)
    joint = apply_unitary(tensor_product(s, ctc), u)
    reduced = partial_trace(joint.density(), keep=1)
    residual = 1.0 - fidelity(ctc, reduced)
    return _verdict("strong", residual, tolerance)


def check_deutsch(
    u: UnitaryGate, rho_in: DensityOperator, rho: DensityOperator, tolerance: float = STRICT_TOL
) -> ConsistencyVerdict:
    """Trace distance between rho and its image under the reduced map."""
    residual = trace_distance(rho, deutsch_map(u, rho_in, rho))
    return _verdict("deutsch", residual, tolerance)


def check_weak(loop: LoopRecord, tolerance: float = STRICT_TOL) -> ConsistencyVerdict:
    """Loop closure: rho_out = rho_in' and rho_out' = rho_in."""
    residual = max(
        trace_distance(loop["rho_out"], loop["rho_in_prime"]),
        trace_distance(loop["rho_out_prime"], loop["rho_in"]),
    )
    return _verdict("weak", residual, tolerance)


def bloch_vector(rho: DensityOperator) -> np.ndarray:
    """Pauli expectation values (x, y, z) of a single-qubit state."""
    if rho.dim != 2:
        raise ValueError("Bloch coordinates are defined for single qubits")
    return np.array([float(np.real(np.trace(p @ rho.matrix))) for p in _PAULI[1:]])


def density_from_bloch(r) -> DensityOperator:
    r = np.asarray(r, dtype=float)
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + 1e-9:
        raise ValueError(f"Bloch vector lies outside the unit ball: |r| = {norm}")
    if norm > 1.0:
        r = r / norm
    mat = 0.5 * (_PAULI[0] + r[0] * _PAULI[1] + r[1] * _PAULI[2] + r[2] * _PAULI[3])
    smallest = float(np.linalg.eigvalsh(mat).min())
    if smallest < 0.0:
        # fp fuzz on the ball surface; mix infinitesimally toward center
        mat = (mat - smallest * np.eye(2)) / (1.0 - 2.0 * smallest)
    return DensityOperator(mat)


def transfer_matrix(u: UnitaryGate, rho_in: DensityOperator) -> np.ndarray:
    """4x4 real matrix of the reduced map in the Pauli basis.

    Coefficients are c_i = Tr(sigma_i rho) so that rho = (1/2) sum c_i
    sigma_i; trace preservation makes the first row (1, 0, 0, 0).
    """
    _require_coupling_shapes(u, rho_in.dim, 2)
    m = np.empty((4, 4))
    for j, pj in enumerate(_PAULI):
        image = _deutsch_map_raw(u.matrix, rho_in.matrix, pj)
        for i, pi in enumerate(_PAULI):
            m[i, j] = 0.5 * np.real(np.trace(pi @ image))
    return m


def _fixed_space(u: UnitaryGate, rho_in: DensityOperator):
    """Solve (I - A) r = b for the Bloch part of the vectorized map.

    Returns the min-norm fixed Bloch vector, the null-space basis of
    (I - A), and the defect of the affine system.
    """
    m = transfer_matrix(u, rho_in)
    a, b = m[1:, 1:], m[1:, 0]
    k = np.eye(3) - a
    r, *_ = np.linalg.lstsq(k, b, rcond=None)
    defect = float(np.linalg.norm(k @ r - b, ord=np.inf))
    _, svals, vt = np.linalg.svd(k)
    null_basis = [vt[i] for i in range(3) if svals[i] < 1e-10]
    return r, null_basis, defect


def solve_deutsch_fixed_point(
    u: UnitaryGate,
    rho_in: DensityOperator,
    method: str = "spectral",
    tolerance: float = STRICT_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> FixedPointSolution:
    """Find rho with rho = deutsch_map(u, rho_in, rho).

    iterative: repeated application of the map starting from the
    maximally mixed state until successive iterates agree within
    ``tolerance`` (at most ``max_iterations`` steps).

    spectral: vectorize the map on the 4-dimensional real space of
    Hermitian operators, take the eigenvalue-1 eigenspace, and project to
    the unit-trace PSD set. Degenerate fixed sets are resolved to the
    maximal-entropy member, which for a qubit is the minimal-Bloch-norm
    point of the fixed affine subspace.
    """
    if method not in ("iterative", "spectral"):
        raise ValueError(f"unknown method {method!r}")
    r_star, null_basis, defect = _fixed_space(u, rho_in)
    dim_fixed = 1 + len(null_basis)
    basis = [0.5 * (_PAULI[0] + sum(r_star[i] * _PAULI[i + 1] for i in range(3)))]
    basis += [0.5 * sum(v[i] * _PAULI[i + 1] for i in range(3)) for v in null_basis]

    if method == "iterative":
        rho = DensityOperator.maximally_mixed()
        step = float("inf")
        for iteration in range(1, max_iterations + 1):
            nxt = deutsch_map(u, rho_in, rho)
            step = trace_distance(nxt, rho)
            rho = nxt
            if step < tolerance:
                residual = trace_distance(rho, deutsch_map(u, rho_in, rho))
                return FixedPointSolution(
                    rho, "iterative", iteration, residual, dim_fixed, tuple(basis)
                )
        raise FixedPointError(
            f"no convergence after {max_iterations} iterations (last step {step:.3e})",
            rho=rho,
            residual=step,
        )

    if defect > 1e-10:
        raise FixedPointError(
            "no fixed point solves the vectorized system; a solution is "
            f"guaranteed to exist, so this signals a numerical or input defect ({defect:.3e})"
        )
    norm = np.linalg.norm(r_star)
    if norm > 1.0 + 1e-9:
        raise FixedPointError(
            "no PSD unit-trace fixed point found in the eigenspace: minimal "
            f"Bloch norm {norm:.6f} exceeds 1; existence is guaranteed, so this "
            "signals a numerical or input defect"
        )
    rho = density_from_bloch(r_star if norm <= 1.0 else r_star / norm)
    residual = trace_distance(rho, deutsch_map(u, rho_in, rho))
    return FixedPointSolution(rho, "spectral", 0, residual, dim_fixed, tuple(basis))


def fixed_set_distance(solution: FixedPointSolution, rho: DensityOperator) -> float:
    """Euclidean Bloch distance from rho to the solver's fixed affine set."""
    r = bloch_vector(rho)
    r0 = bloch_vector(solution.rho)
    if not solution.degenerate:
        return float(np.linalg.norm(r - r0))
    directions = []
    for mat in solution.fixed_space_basis[1:]:
        directions.append([float(np.real(np.trace(p @ mat))) for p in _PAULI[1:]])
    basis = np.array(directions).T  # 3 x k
    coef, *_ = np.linalg.lstsq(basis, r - r0, rcond=None)
    return float(np.linalg.norm(r - r0 - basis @ coef))


def bloch_grid(resolution: int):
    """Deterministic grid over the Bloch ball, poles and center deduped.

    Radius covers purity 0.5 to 1 (|r| from 0 to 1) in resolution//2 + 1
    steps; polar and azimuthal angles get resolution//2 + 1 and
    resolution points.
    """
    if resolution < 8:
        raise ValueError(f"grid resolution must be at least 8, got {resolution}")
    radii = np.linspace(0.0, 1.0, resolution // 2 + 1)
    thetas = np.linspace(0.0, np.pi, resolution // 2 + 1)
    phis = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    points = [np.zeros(3)]
    for radius in radii[1:]:
        for theta in thetas:
            if theta in (0.0, np.pi):
                phi_values = phis[:1]
            else:
                phi_values = phis
            for phi in phi_values:
                points.append(
                    radius
                    * np.array(
                        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
                    )
                )
    return np.array(points)


def scan_admissible_inputs(
    u: UnitaryGate,
    rho: DensityOperator,
    grid_resolution: int,
    residual_tolerance: float = SOLVER_AGREEMENT_TOL,
):
    """Sweep candidate chronology-respecting inputs over a Bloch grid.

    Returns the (rho_in, residual) pairs whose Deutsch residual against
    the fixed CTC state rho stays within ``residual_tolerance``. Single-
    qubit trace distance equals half the Euclidean Bloch distance, so the
    sweep is evaluated in Bloch coordinates; the result is identical to
    calling check_deutsch per point.
    """
    _require_coupling_shapes(u, 2, rho.dim)
    # the map rho_in -> Tr_A[U(rho_in (x) rho)U+] is linear in rho_in
    m = np.empty((4, 4))
    for j, pj in enumerate(_PAULI):
        joint = u.matrix @ np.kron(pj, rho.matrix) @ u.matrix.conj().T
        image = np.trace(joint.reshape(2, 2, 2, 2), axis1=0, axis2=2)
        for i, pi in enumerate(_PAULI):
            m[i, j] = 0.5 * np.real(np.trace(pi @ image))
    a, b = m[1:, 1:], m[1:, 0]
    grid = bloch_grid(grid_resolution)
    target = bloch_vector(rho)
    images = grid @ a.T + b
    residuals = 0.5 * np.linalg.norm(images - target, axis=1)
    admissible = []
    for point, residual in zip(grid, residuals):
        if residual <= residual_tolerance:
            admissible.append((density_from_bloch(point), float(residual)))
    return admissible
