"""The Alice/Bob session engine for the CTC communication protocol.

A session couples an unknown chronology-respecting qubit to the CTC qubit
with a two-qubit gate, measures, sends one classical bit forward, and has
Bob undo the coupling with a prepared ancilla. Every run allocates exactly
one branch from a ledger, records an ordered event transcript, checks loop
closure, and books its resource flows. Misbehavior scenarios (Bob skipping
his gate, Bob trying to signal his own past) break closure and collapse
the branch instead of transferring a state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import serialize
from .consistency import LoopRecord, check_deutsch, check_weak
from .gates import GateSpec, UnitaryGate, bell_pair, build_gate, cnot, embed, hadamard
from .resources import LedgerEntry, ResourceKind
from .states import (
    DensityOperator,
    StateVector,
    apply_unitary,
    fidelity,
    measurement_branch,
    partial_trace,
    purity,
    tensor_product,
    trace_distance,
)
from .topology import BranchLedger

SCENARIOS = ("nominal", "bob_skips", "self_signal", "beam", "storage")
FORMALISMS = ("wavefunction", "density")
BEAM_POLICIES = ("collapse", "discard", "noise")

PURITY_TOL = 1e-10
TRANSFER_FIDELITY = 1.0 - 1e-12

_BASIS_VECTORS = {
    "computational": (
        np.array([1.0, 0.0], dtype=complex),
        np.array([0.0, 1.0], dtype=complex),
    ),
    "hadamard": (
        np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
        np.array([1.0, -1.0], dtype=complex) / np.sqrt(2),
    ),
}


class ProtocolError(RuntimeError):
    """Session misuse: bad config, stage ordering, wrong scenario entry point."""


class CausalityError(RuntimeError):
    """Chirality violation: an event against the direction of linear time."""


@dataclass(frozen=True)
class TranscriptEvent:
    order: int
    actor: str
    kind: str
    detail: dict
    time_direction: Optional[str] = None

    def to_json(self) -> dict:
        doc = {
            "order": self.order,
            "actor": self.actor,
            "kind": self.kind,
            "detail": self.detail,
        }
        if self.time_direction is not None:
            doc["time_direction"] = self.time_direction
        return doc


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    payload: tuple
    timestamp_order: int
    channel: str = "classical"

    def to_json(self) -> dict:
        return {
            "sender": self.sender,
            "payload": list(self.payload),
            "timestamp_order": self.timestamp_order,
            "channel": self.channel,
        }


@dataclass(frozen=True)
class ProtocolConfig:
    """Inputs for one session; states must be normalized single qubits."""

    input_state: StateVector
    ctc_initial: StateVector = field(default_factory=lambda: StateVector.basis(0))
    gate: GateSpec = field(default_factory=lambda: GateSpec("swap"))
    formalism: str = "wavefunction"
    scenario: str = "nominal"
    bob_measures: bool = False
    seed: int = 0
    storage_cycles: int = 5

    def __post_init__(self):
        if self.input_state.dim != 2 or self.ctc_initial.dim != 2:
            raise ProtocolError("input and CTC states must be single qubits")
        if self.formalism not in FORMALISMS:
            raise ProtocolError(f"unknown formalism {self.formalism!r}")
        if self.scenario not in SCENARIOS:
            raise ProtocolError(f"unknown scenario {self.scenario!r}")
        if build_gate(self.gate).dim != 4:
            raise ProtocolError("the coupling gate must act on 2 qubits")
        if self.storage_cycles < 0:
            raise ProtocolError("storage_cycles must be nonnegative")

    @classmethod
    def from_json(cls, document: dict) -> "ProtocolConfig":
        gate_doc = document.get("gate", {"name": "swap"})
        kwargs = {
            "input_state": StateVector.from_json(document["input_state"]),
            "gate": GateSpec(
                gate_doc.get("name", "swap"),
                gate_doc.get("params"),
                gate_doc.get("custom_path"),
            ),
        }
        if "ctc_initial" in document:
            kwargs["ctc_initial"] = StateVector.from_json(document["ctc_initial"])
        for key in ("formalism", "scenario", "bob_measures", "seed", "storage_cycles"):
            if key in document:
                kwargs[key] = document[key]
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path) -> "ProtocolConfig":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_json(json.load(handle))


@dataclass
class Transcript:
    """Everything one run did, in order, plus its verdicts and ledger."""

    protocol: str
    seed: Optional[int]
    events: list
    final_verdicts: dict
    collapse_flag: bool
    transferred_state: Optional[DensityOperator]
    transfer_fidelity: Optional[float]
    resource_entries: list
    branch_id: Optional[int]
    detail: dict

    def __post_init__(self):
        orders = [e.order for e in self.events]
        if orders != sorted(orders) or len(set(orders)) != len(orders):
            raise ProtocolError("transcript events must be strictly ordered")
        bob_started = False
        for event in self.events:
            if event.time_direction is not None and event.time_direction != "forward":
                raise CausalityError(
                    f"contact event {event.order} must run parallel to linear time"
                )
            if event.actor == "bob":
                bob_started = True
            elif event.actor == "alice" and bob_started:
                raise CausalityError("Alice events must precede all of Bob's")
            if (
                event.kind == "message"
                and event.detail.get("sender") == "bob"
                and not self.collapse_flag
            ):
                raise ProtocolError("a Bob-to-Alice message requires a collapsed run")

    def to_json(self) -> dict:
        from .resources import tally

        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "branch_id": self.branch_id,
            "collapse_flag": self.collapse_flag,
            "events": [e.to_json() for e in self.events],
            "verdicts": {name: v.to_json() for name, v in sorted(self.final_verdicts.items())},
            "ledger": [entry.to_json() for entry in self.resource_entries],
            "tally": {kind.value: delta for kind, delta in sorted(tally(self).items())},
            "transfer_fidelity": self.transfer_fidelity,
            "transferred_state": (
                None if self.transferred_state is None else self.transferred_state.to_json()
            ),
            "detail": self.detail,
        }


class Session:
    """Mutable state for one protocol run; owns one ledger branch."""

    def __init__(self, config: ProtocolConfig, ledger: Optional[BranchLedger] = None):
        self.config = config
        self.gate: UnitaryGate = build_gate(config.gate)
        self.ledger = ledger if ledger is not None else BranchLedger()
        self.rng = np.random.default_rng(config.seed)
        self.events: list[TranscriptEvent] = []
        self.resource_entries: list[LedgerEntry] = []
        self.collapse_reasons: list[str] = []
        self.messages: list[ClassicalMessage] = []
        self.stage = "created"
        self._order = 0
        self._bob_started = False

        self.rho_in = config.ctc_initial.density()
        self.carried: Union[StateVector, DensityOperator, None] = None
        self.loop_states: dict[str, DensityOperator] = {"rho_in": self.rho_in}
        self.transferred: Optional[DensityOperator] = None
        self.transfer_fidelity: Optional[float] = None
        self.detail: dict = {
            "scenario": config.scenario,
            "formalism": config.formalism,
            "gate": self.gate.label,
        }

        self.branch_id = self.ledger.allocate(p_order=0, q_order=1)
        self.ledger.set_states(self.branch_id, initial=self.rho_in)
        self.event("system", "branch_allocate", {"branch_id": self.branch_id})
        self.book(ResourceKind.CTCBIT, -1)

    def event(
        self, actor: str, kind: str, detail: dict, time_direction: Optional[str] = None
    ) -> TranscriptEvent:
        if actor == "bob":
            self._bob_started = True
        elif actor == "alice" and self._bob_started:
            raise CausalityError("Alice events must precede all of Bob's")
        if kind in ("gate", "encode", "storage_cycle") and time_direction != "forward":
            raise CausalityError("contact events must run parallel to linear time")
        evt = TranscriptEvent(self._order, actor, kind, detail, time_direction)
        self._order += 1
        self.events.append(evt)
        self.ledger.touch(self.branch_id, evt.order)
        return evt

    def book(self, kind: ResourceKind, delta: int, event_ref: Optional[int] = None) -> None:
        ref = event_ref if event_ref is not None else (self._order - 1)
        self.resource_entries.append(LedgerEntry(kind, delta, ref))

    def collapse(self, reason: str) -> None:
        self.collapse_reasons.append(reason)
        self.event("system", "collapse", {"reason": reason})

    def carried_density(self) -> DensityOperator:
        return self.carried.density() if isinstance(self.carried, StateVector) else self.carried


def _sample_outcome(rng, probabilities) -> int:
    draw = rng.random()
    return 0 if draw < probabilities[0] else 1


def _coupling_wavefunction(session: Session, chrono: StateVector, ctc: StateVector, actor: str):
    """Apply the gate, collapse-check, measure-and-factor for pure states.

    Returns (probabilities, outcome, chronology factor, ctc factor), or
    None when the coupling entangled the qubits and the branch collapsed.
    """
    joint = apply_unitary(tensor_product(chrono, ctc), session.gate)
    session.event(actor, "gate", {"gate": session.gate.label}, time_direction="forward")
    reduced_ctc = partial_trace(joint.density(), keep=1)
    if purity(reduced_ctc) < 1.0 - PURITY_TOL:
        session.collapse(f"{actor}_coupling_left_ctc_mixed")
        return None
    branches = [measurement_branch(joint, 0, vec) for vec in _BASIS_VECTORS["computational"]]
    probabilities = [b.norm() ** 2 for b in branches]
    outcome = _sample_outcome(session.rng, probabilities)
    chrono_factor = StateVector.basis(outcome)
    ctc_factor = branches[outcome].normalize()
    session.event(
        actor,
        "measurement",
        {
            "subsystem": "chronology",
            "basis": "computational",
            "probabilities": [float(p) for p in probabilities],
            "outcome": outcome,
            "unnormalized_branches": [
                serialize.complex_to_pairs(b.amplitudes) for b in branches
            ],
        },
    )
    return probabilities, outcome, chrono_factor, ctc_factor


def _coupling_density(session: Session, chrono: DensityOperator, ctc: DensityOperator, actor: str):
    """Density-operator mirror of the coupling stage (projective form)."""
    joint = apply_unitary(tensor_product(chrono, ctc), session.gate)
    session.event(actor, "gate", {"gate": session.gate.label}, time_direction="forward")
    reduced_ctc = partial_trace(joint, keep=1)
    if purity(reduced_ctc) < 1.0 - PURITY_TOL:
        session.collapse(f"{actor}_coupling_left_ctc_mixed")
        return None
    basis = _BASIS_VECTORS["computational"]
    projected = []
    probabilities = []
    for vec in basis:
        proj = np.kron(np.outer(vec, vec.conj()), np.eye(2, dtype=complex))
        collapsed = proj @ joint.matrix @ proj
        probabilities.append(float(np.real(np.trace(collapsed))))
        projected.append(collapsed)
    outcome = _sample_outcome(session.rng, probabilities)
    post = DensityOperator(projected[outcome] / probabilities[outcome])
    chrono_factor = partial_trace(post, keep=0)
    ctc_factor = partial_trace(post, keep=1)
    session.event(
        actor,
        "measurement",
        {
            "subsystem": "chronology",
            "basis": "computational",
            "probabilities": probabilities,
            "outcome": outcome,
        },
    )
    return probabilities, outcome, chrono_factor, ctc_factor


def run_alice_stage(config: ProtocolConfig, session: Session) -> Optional[ClassicalMessage]:
    """Couple Alice's qubit to the CTC, measure, emit the classical bit.

    Returns None when the coupling collapses the branch (an entangling
    gate leaves the CTC mixed, so the loop can never close).
    """
    if session.stage != "created":
        raise ProtocolError(f"Alice stage cannot run from stage {session.stage!r}")
    if config.formalism == "wavefunction":
        result = _coupling_wavefunction(session, config.input_state, config.ctc_initial, "alice")
    else:
        result = _coupling_density(
            session, config.input_state.density(), config.ctc_initial.density(), "alice"
        )
    if result is None:
        joint = apply_unitary(
            tensor_product(config.input_state.density(), config.ctc_initial.density()),
            session.gate,
        )
        session.carried = partial_trace(joint, keep=1)
        session.loop_states["rho_out"] = session.carried
        session.stage = "collapsed_at_alice"
        return None
    probabilities, outcome, _, ctc_factor = result
    session.carried = ctc_factor
    session.loop_states["rho_out"] = session.carried_density()
    session.detail["alice_outcome"] = outcome
    session.detail["alice_probabilities"] = [float(p) for p in probabilities]
    message = ClassicalMessage("alice", (outcome,), session._order)
    session.messages.append(message)
    session.event("alice", "message", message.to_json())
    session.book(ResourceKind.CBIT, -1)
    session.stage = "alice_done"
    return message


def run_storage_cycles(config: ProtocolConfig, session: Session) -> None:
    """Idle circulations of the loop; the CTC segment must not evolve."""
    before = session.carried_density()
    for cycle in range(config.storage_cycles):
        session.event(
            "system", "storage_cycle", {"cycle": cycle, "evolution": "identity"},
            time_direction="forward",
        )
        after = session.carried_density()
        if trace_distance(before, after) > 0.0:
            raise ProtocolError("storage circulation altered the CTC state")
    session.detail["storage_cycles"] = config.storage_cycles


def run_bob_stage(config: ProtocolConfig, session: Session, msg: ClassicalMessage) -> Session:
    """Bob prepares |outcome>, couples it to the CTC, optionally measures."""
    if session.stage != "alice_done":
        raise ProtocolError(f"Bob stage cannot run from stage {session.stage!r}")
    if msg is None or msg.sender != "alice":
        raise ProtocolError("Bob's stage needs Alice's classical message")
    session.loop_states["rho_in_prime"] = session.carried_density()

    reported = int(msg.payload[0])
    ancilla = StateVector.basis(reported)
    session.event("bob", "prepare", {"ancilla": reported, "from_message": msg.to_json()})
    session.book(ResourceKind.ANCILLA, -1)

    if config.scenario == "bob_skips":
        session.event("bob", "skip", {"reason": "gate and measurement omitted"})
        session.collapse("bob_skipped_gate")
        session.loop_states["rho_out_prime"] = session.carried_density()
        session.stage = "bob_done"
        return session

    measure = config.bob_measures or config.scenario == "self_signal"
    if config.formalism == "wavefunction":
        joint = apply_unitary(tensor_product(ancilla, session.carried), session.gate)
        session.event("bob", "gate", {"gate": session.gate.label}, time_direction="forward")
        reduced_ctc = partial_trace(joint.density(), keep=1)
        if purity(reduced_ctc) < 1.0 - PURITY_TOL:
            session.collapse("bob_coupling_left_ctc_mixed")
            session.carried = reduced_ctc
            session.loop_states["rho_out_prime"] = reduced_ctc
            session.stage = "bob_done"
            return session
        chrono_reduced = partial_trace(joint.density(), keep=0)
        session.transfer_fidelity = fidelity(config.input_state, chrono_reduced)
        if measure:
            branches = [
                measurement_branch(joint, 0, vec) for vec in _BASIS_VECTORS["computational"]
            ]
            probabilities = [b.norm() ** 2 for b in branches]
            outcome = _sample_outcome(session.rng, probabilities)
            session.carried = branches[outcome].normalize()
            session.event(
                "bob",
                "measurement",
                {
                    "subsystem": "chronology",
                    "basis": "computational",
                    "probabilities": [float(p) for p in probabilities],
                    "outcome": outcome,
                },
            )
            session.detail["bob_outcome"] = outcome
            session.detail["bob_probabilities"] = [float(p) for p in probabilities]
        else:
            session.carried = partial_trace(joint.density(), keep=1)
            session.transferred = chrono_reduced
    else:
        joint = apply_unitary(
            tensor_product(ancilla.density(), session.carried_density()), session.gate
        )
        session.event("bob", "gate", {"gate": session.gate.label}, time_direction="forward")
        reduced_ctc = partial_trace(joint, keep=1)
        if purity(reduced_ctc) < 1.0 - PURITY_TOL:
            session.collapse("bob_coupling_left_ctc_mixed")
            session.carried = reduced_ctc
            session.loop_states["rho_out_prime"] = reduced_ctc
            session.stage = "bob_done"
            return session
        chrono_reduced = partial_trace(joint, keep=0)
        session.transfer_fidelity = fidelity(config.input_state, chrono_reduced)
        if measure:
            basis = _BASIS_VECTORS["computational"]
            probabilities = []
            posts = []
            for vec in basis:
                proj = np.kron(np.outer(vec, vec.conj()), np.eye(2, dtype=complex))
                collapsed = proj @ joint.matrix @ proj
                probabilities.append(float(np.real(np.trace(collapsed))))
                posts.append(collapsed)
            outcome = _sample_outcome(session.rng, probabilities)
            post = DensityOperator(posts[outcome] / probabilities[outcome])
            session.carried = partial_trace(post, keep=1)
            session.event(
                "bob",
                "measurement",
                {
                    "subsystem": "chronology",
                    "basis": "computational",
                    "probabilities": probabilities,
                    "outcome": outcome,
                },
            )
            session.detail["bob_outcome"] = outcome
            session.detail["bob_probabilities"] = probabilities
        else:
            session.carried = reduced_ctc
            session.transferred = chrono_reduced

    if config.scenario == "self_signal":
        bob_outcome = session.detail["bob_outcome"]
        encoded = apply_unitary(StateVector.basis(bob_outcome), hadamard())
        session.carried = encoded
        session.event(
            "bob",
            "encode",
            {
                "reason": "encode own measurement outcome into the returning CTC qubit",
                "encoded_bit": bob_outcome,
            },
            time_direction="forward",
        )
        illegal = ClassicalMessage("bob", (bob_outcome,), session._order, channel="ctc")
        session.messages.append(illegal)
        session.event("bob", "message", illegal.to_json())
        session.collapse("self_signal")

    session.loop_states["rho_out_prime"] = session.carried_density()
    session.stage = "bob_done"
    return session


def run_session(config: ProtocolConfig, ledger: Optional[BranchLedger] = None) -> Transcript:
    """Execute one full protocol run and return its transcript."""
    if config.scenario == "beam":
        raise ProtocolError("the beam scenario aggregates many trials; use run_beam()")
    session = Session(config, ledger)
    message = run_alice_stage(config, session)
    if session.stage == "alice_done":
        if config.scenario == "storage":
            run_storage_cycles(config, session)
        run_bob_stage(config, session, message)
    else:
        session.loop_states.setdefault("rho_in_prime", session.carried_density())
        session.loop_states.setdefault("rho_out_prime", session.carried_density())

    loop = LoopRecord.from_states(
        session.loop_states["rho_in"],
        session.loop_states["rho_out"],
        session.loop_states["rho_in_prime"],
        session.loop_states["rho_out_prime"],
    )
    weak = check_weak(loop)
    deutsch = check_deutsch(
        session.gate, config.input_state.density(), config.ctc_initial.density()
    )
    session.event(
        "system",
        "consistency_check",
        {"weak": weak.to_json(), "deutsch": deutsch.to_json()},
    )
    collapse_flag = bool(session.collapse_reasons) or not weak.passed

    branch_outcome = "collapsed" if collapse_flag else "merged"
    session.ledger.set_states(
        session.branch_id, final=session.loop_states["rho_out_prime"]
    )
    # the consume event is the branch's terminal access; record it first
    session.event(
        "system", "branch_consume", {"branch_id": session.branch_id, "outcome": branch_outcome}
    )
    session.ledger.consume(session.branch_id, branch_outcome)
    session.detail["branch_status"] = session.ledger.status(session.branch_id)

    success = (
        not collapse_flag
        and weak.passed
        and (session.transfer_fidelity is None or session.transfer_fidelity >= TRANSFER_FIDELITY)
    )
    if success:
        session.book(ResourceKind.QUBIT, 1)

    session.detail["collapse_reasons"] = list(session.collapse_reasons)
    return Transcript(
        protocol="ctc_transfer",
        seed=config.seed,
        events=session.events,
        final_verdicts={"weak": weak, "deutsch": deutsch},
        collapse_flag=collapse_flag,
        transferred_state=session.transferred,
        transfer_fidelity=session.transfer_fidelity,
        resource_entries=session.resource_entries,
        branch_id=session.branch_id,
        detail=session.detail,
    )


@dataclass(frozen=True)
class BeamReport:
    """Aggregate of many single-use trials against a beam of CTC qubits."""

    trials: int
    policy: str
    seed: int
    basis_match_fraction: float
    records: list
    branch_summary: dict

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "policy": self.policy,
            "seed": self.seed,
            "basis_match_fraction": self.basis_match_fraction,
            "records": self.records,
            "branch_summary": self.branch_summary,
        }


def run_beam(
    trials: int,
    policy: str = "collapse",
    seed: int = 0,
    force_match: bool = False,
) -> BeamReport:
    """BB84-style use of a beam of CTC qubits in random bases.

    Each trial's CTC qubit arrives in a random basis (computational or
    Hadamard) and a random state within it. Alice swaps a known probe in,
    measures what came out in a random basis, and learns the state exactly
    when her basis guess matches the preparation. Mismatched trials are
    handled per ``policy``: collapse the branch, discard the trial, or
    proceed and accept noise. Per-trial RNG streams derive from
    (seed, trial index) so aggregates do not depend on scheduling.
    """
    if trials < 1:
        raise ProtocolError(f"trials must be at least 1, got {trials}")
    if policy not in BEAM_POLICIES:
        raise ProtocolError(f"unknown policy {policy!r}; expected one of {BEAM_POLICIES}")
    basis_names = ("computational", "hadamard")
    swap_matrix = build_gate(GateSpec("swap")).matrix
    probe = StateVector.basis(0)
    ledger = BranchLedger()
    records = []
    matches = 0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        prep_basis = int(rng.integers(2))
        prep_bit = int(rng.integers(2))
        prep_state = StateVector(_BASIS_VECTORS[basis_names[prep_basis]][prep_bit])
        meas_basis = prep_basis if force_match else int(rng.integers(2))

        branch_id = ledger.allocate()
        ledger.set_states(branch_id, initial=prep_state.density())
        # swap the known probe in; Alice's chronology qubit now holds the
        # beam state and the CTC carries the probe
        joint = (swap_matrix @ np.kron(probe.amplitudes, prep_state.amplitudes)).reshape(2, 2)
        basis_pair = _BASIS_VECTORS[basis_names[meas_basis]]
        probabilities = [float(np.linalg.norm(vec.conj() @ joint) ** 2) for vec in basis_pair]
        outcome = _sample_outcome(rng, probabilities)
        matched = meas_basis == prep_basis
        restored = StateVector(basis_pair[outcome])

        if matched:
            matches += 1
            action = "completed"
            ledger.set_states(branch_id, final=restored.density())
            ledger.consume(branch_id, "merged")
            residual = trace_distance(prep_state.density(), restored.density())
        elif policy == "collapse":
            action = "collapsed"
            ledger.consume(branch_id, "collapsed")
            residual = None
        elif policy == "discard":
            action = "discarded"
            ledger.consume(branch_id, "collapsed")
            residual = None
        else:
            action = "noise"
            residual = trace_distance(prep_state.density(), restored.density())
            ledger.set_states(branch_id, final=restored.density())
            ledger.consume(branch_id, "collapsed")
        records.append(
            {
                "trial": trial,
                "prep_basis": basis_names[prep_basis],
                "prep_bit": prep_bit,
                "meas_basis": basis_names[meas_basis],
                "outcome": outcome,
                "matched": matched,
                "action": action,
                "closure_residual": residual,
            }
        )
    statuses = ledger.summary().values()
    summary = {
        "merged": sum(1 for s in statuses if s == "consumed"),
        "collapsed": sum(1 for s in statuses if s == "collapsed"),
        "distinct_branches": len(statuses),
    }
    return BeamReport(trials, policy, seed, matches / trials, records, summary)


def run_teleportation_baseline(input_state: StateVector, seed: int = 0) -> Transcript:
    """Standard teleportation: one shared pair, two classical bits, one qubit.

    All four Bell-measurement outcomes are enumerated with their Pauli
    corrections; the transcript samples one but records the whole table.
    """
    if input_state.dim != 2:
        raise ProtocolError("teleportation input must be a single qubit")
    rng = np.random.default_rng(seed)
    events: list[TranscriptEvent] = []
    entries: list[LedgerEntry] = []
    order = 0

    def emit(actor, kind, detail):
        nonlocal order
        events.append(TranscriptEvent(order, actor, kind, detail))
        order += 1
        return order - 1

    pair = bell_pair()
    ref = emit("alice", "prepare", {"state": "bell_pair", "shared_with": "bob"})
    entries.append(LedgerEntry(ResourceKind.EBIT, -1, ref))

    psi = tensor_product(input_state, pair)
    psi = apply_unitary(psi, embed(cnot(), [0, 1], 3))
    emit("alice", "gate", {"gate": "cnot", "targets": [0, 1]})
    psi = apply_unitary(psi, embed(hadamard(), [0], 3))
    emit("alice", "gate", {"gate": "hadamard", "targets": [0]})

    x_mat = np.array([[0, 1], [1, 0]], dtype=complex)
    z_mat = np.array([[1, 0], [0, -1]], dtype=complex)
    comp = _BASIS_VECTORS["computational"]
    outcome_table = {}
    corrected_states = {}
    probabilities = []
    for m0 in (0, 1):
        first = measurement_branch(psi, 0, comp[m0])
        for m1 in (0, 1):
            second = measurement_branch(first, 0, comp[m1])
            prob = second.norm() ** 2
            corrected = np.linalg.matrix_power(z_mat, m0) @ (
                np.linalg.matrix_power(x_mat, m1) @ second.amplitudes
            )
            corrected = corrected / np.linalg.norm(corrected)
            fid = fidelity(input_state, StateVector(corrected))
            key = f"{m0}{m1}"
            outcome_table[key] = {"probability": float(prob), "fidelity": float(fid)}
            corrected_states[key] = StateVector(corrected)
            probabilities.append(prob)

    draw = rng.random()
    cumulative = 0.0
    sampled = "11"
    for key, entry in outcome_table.items():
        cumulative += entry["probability"]
        if draw < cumulative:
            sampled = key
            break
    m0, m1 = int(sampled[0]), int(sampled[1])

    emit("alice", "measurement", {"subsystem": 0, "basis": "bell_via_cnot_h", "outcome": m0})
    emit("alice", "measurement", {"subsystem": 1, "basis": "bell_via_cnot_h", "outcome": m1})
    ref = emit("alice", "message", {"sender": "alice", "payload": [m0], "channel": "classical"})
    entries.append(LedgerEntry(ResourceKind.CBIT, -1, ref))
    ref = emit("alice", "message", {"sender": "alice", "payload": [m1], "channel": "classical"})
    entries.append(LedgerEntry(ResourceKind.CBIT, -1, ref))
    emit("bob", "correction", {"apply_x": m1, "apply_z": m0})
    transferred = corrected_states[sampled].density()
    transfer_fid = outcome_table[sampled]["fidelity"]
    ref = emit("bob", "transfer_complete", {"outcome": sampled})
    entries.append(LedgerEntry(ResourceKind.QUBIT, 1, ref))

    return Transcript(
        protocol="teleportation",
        seed=seed,
        events=events,
        final_verdicts={},
        collapse_flag=False,
        transferred_state=transferred,
        transfer_fidelity=transfer_fid,
        resource_entries=entries,
        branch_id=None,
        detail={"outcome_table": outcome_table, "sampled_outcome": sampled},
    )


def run_ebit_distribution(seed: int = 0) -> Transcript:
    """Turn one use of a noiseless qubit channel into one shared ebit."""
    events = []
    entries = []
    pair = bell_pair()
    events.append(
        TranscriptEvent(0, "alice", "prepare", {"state": "bell_pair", "location": "local"})
    )
    events.append(
        TranscriptEvent(1, "alice", "channel_send", {"what": "second half", "channel": "qubit"})
    )
    entries.append(LedgerEntry(ResourceKind.QUBIT, -1, 1))
    events.append(
        TranscriptEvent(2, "system", "shared_state", {"holders": ["alice", "bob"]})
    )
    entries.append(LedgerEntry(ResourceKind.EBIT, 1, 2))
    shared = pair.density()
    return Transcript(
        protocol="ebit_distribution",
        seed=seed,
        events=events,
        final_verdicts={},
        collapse_flag=False,
        transferred_state=shared,
        transfer_fidelity=fidelity(pair, shared),
        resource_entries=entries,
        branch_id=None,
        detail={"target": "bell_pair"},
    )
