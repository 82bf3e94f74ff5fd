"""Finite point-set topology demonstrator and the single-use branch ledger.

The branching constructions are finite stand-ins for line splitting on a
spacetime manifold: a shared past, several copies of the branch point, and
per-branch charts that are each open together with the past. A finite
space is Hausdorff only if it is discrete, so the branch copies (which
share every neighborhood) witness the failure.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional

from .states import DensityOperator, trace_distance

BRANCH_STATUSES = ("fresh", "in_use", "consumed", "collapsed")


class BranchError(RuntimeError):
    """Violation of the single-use branch contract."""


class TopologySpace:
    """A finite set of labeled points plus a collection of open sets."""

    __slots__ = ("points", "opens")

    def __init__(self, points: Iterable[str], opens: Iterable[Iterable[str]]):
        pts = tuple(str(p) for p in points)
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate point labels")
        seen = set()
        unique_opens = []
        for subset in opens:
            fs = frozenset(str(p) for p in subset)
            if not fs <= set(pts):
                raise ValueError(f"open set {sorted(fs)} contains unknown points")
            if fs not in seen:
                seen.add(fs)
                unique_opens.append(fs)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "opens", tuple(unique_opens))

    def __setattr__(self, name, value):
        raise AttributeError("TopologySpace is immutable")

    @classmethod
    def discrete(cls, points: Iterable[str]) -> "TopologySpace":
        pts = [str(p) for p in points]
        opens = [[]]
        for r in range(1, len(pts) + 1):
            opens.extend(list(c) for c in combinations(pts, r))
        return cls(pts, opens)

    @classmethod
    def indiscrete(cls, points: Iterable[str]) -> "TopologySpace":
        pts = [str(p) for p in points]
        return cls(pts, [[], pts])

    @classmethod
    def from_subbasis(cls, points: Iterable[str], subbasis: Iterable[Iterable[str]]) -> "TopologySpace":
        """Generate the coarsest topology containing the given sets."""
        pts = tuple(str(p) for p in points)
        full = frozenset(pts)
        gen = [frozenset(str(p) for p in s) for s in subbasis]
        basis = {full, frozenset()}
        # finite intersections of generators
        frontier = {full}
        for g in gen:
            frontier = frontier | {g & f for f in frontier} | {g}
            basis |= frontier
        # arbitrary (= finite) unions of basis sets
        opens = {frozenset()}
        frontier = set(basis)
        while frontier:
            new = set()
            for b in basis:
                for o in frontier:
                    u = b | o
                    if u not in opens and u not in frontier and u not in new:
                        new.add(u)
            opens |= frontier
            frontier = new
        return cls(pts, sorted(opens, key=lambda s: (len(s), sorted(s))))

    def subspace(self, subset: Iterable[str]) -> "TopologySpace":
        """Induced topology: traces of the opens on the subset."""
        sub = [p for p in self.points if p in set(subset)]
        traces = {frozenset(sub) & o for o in self.opens}
        return TopologySpace(sub, traces)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "opens": [sorted(o) for o in self.opens],
        }

    @classmethod
    def from_json(cls, document: dict) -> "TopologySpace":
        return cls(document["points"], document["opens"])


def validate_topology(space: TopologySpace):
    """Check the axioms by enumeration; returns (ok, violations)."""
    violations = []
    opens = set(space.opens)
    full = frozenset(space.points)
    if frozenset() not in opens:
        violations.append("the empty set is not open")
    if full not in opens:
        violations.append("the full point set is not open")
    for o1, o2 in combinations(opens, 2):
        if o1 | o2 not in opens:
            violations.append(f"union {sorted(o1 | o2)} of opens is not open")
        if o1 & o2 not in opens:
            violations.append(f"intersection {sorted(o1 & o2)} of opens is not open")
    return (not violations, violations)


def _minimal_open(space: TopologySpace, point: str) -> frozenset:
    out = frozenset(space.points)
    for o in space.opens:
        if point in o:
            out &= o
    return out


def is_hausdorff(space: TopologySpace):
    """Pairwise separation test; returns (ok, witness_pair_or_None).

    In a finite space every point has a minimal open neighborhood, and
    two points are separable exactly when those minimal opens are
    disjoint. On failure the witness is the first non-separable pair in
    point-list order.
    """
    ok, violations = validate_topology(space)
    if not ok:
        raise ValueError(f"not a topology: {violations[0]}")
    minimal = {p: _minimal_open(space, p) for p in space.points}
    for x, y in combinations(space.points, 2):
        if minimal[x] & minimal[y]:
            return False, (x, y)
    return True, None


def build_line_splitting(copies: int) -> TopologySpace:
    """Finite line-splitting model: one past, ``copies`` branch points,
    one future, with each branch chart {past, branch_i, future} open.

    Branch points share every neighborhood pairwise, so the space is
    never Hausdorff; branch points are listed first so they form the
    reported witness.
    """
    if copies < 2:
        raise ValueError(f"line splitting needs at least 2 copies, got {copies}")
    branch_points = [f"0_{i}" for i in range(1, copies + 1)]
    points = branch_points + ["-1", "+1"]
    subbasis = [["-1"], ["+1"]] + [["-1", bp, "+1"] for bp in branch_points]
    return TopologySpace.from_subbasis(points, subbasis)


@dataclass(frozen=True)
class EventPoint:
    """A removed-and-copied spacetime event on one branch.

    P marks where the CTC qubit exits the coupling gate (loop event 0)
    and Q where it re-enters (loop event 1); P precedes Q in loop order.
    """

    label: str
    branch_id: int
    linear_time_order: int

    def __post_init__(self):
        if self.label not in ("P", "Q"):
            raise ValueError(f"event label must be P or Q, got {self.label!r}")


@dataclass
class _BranchRecord:
    branch_id: int
    status: str = "fresh"
    p_event: Optional[EventPoint] = None
    q_event: Optional[EventPoint] = None
    transcript_ref: Optional[int] = None
    initial_state: Optional[DensityOperator] = None
    final_state: Optional[DensityOperator] = None
    access_log: list = field(default_factory=list)


class BranchLedger:
    """Registry enforcing single use of the CTC qubit.

    At most one branch is accessible (in_use) at a time; consuming a
    branch — merged when the loop closed, collapsed when it did not — is
    terminal, and any later access raises :class:`BranchError`. Mutations
    are serialized through an internal lock.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._records: dict[int, _BranchRecord] = {}
        self._next_id = 0
        self._in_use: Optional[int] = None

    def allocate(self, p_order: int = 0, q_order: int = 1) -> int:
        with self._lock:
            if self._in_use is not None:
                raise BranchError(
                    f"branch {self._in_use} is already in use; only one branch "
                    "is accessible at a time"
                )
            branch_id = self._next_id
            self._next_id += 1
            record = _BranchRecord(branch_id)
            record.p_event = EventPoint("P", branch_id, p_order)
            record.q_event = EventPoint("Q", branch_id, q_order)
            record.status = "in_use"
            self._records[branch_id] = record
            self._in_use = branch_id
            return branch_id

    def _accessible(self, branch_id: int) -> _BranchRecord:
        if branch_id not in self._records:
            raise BranchError(f"unknown branch id {branch_id}")
        record = self._records[branch_id]
        if record.status in ("consumed", "collapsed"):
            raise BranchError(
                f"branch {branch_id} is {record.status}; a used branch can never "
                "be accessed again"
            )
        return record

    def touch(self, branch_id: int, event_ref: Optional[int] = None) -> None:
        """Record a protocol event referencing the branch."""
        with self._lock:
            record = self._accessible(branch_id)
            record.access_log.append(event_ref)

    def set_states(self, branch_id: int, initial=None, final=None) -> None:
        with self._lock:
            record = self._accessible(branch_id)
            if initial is not None:
                record.initial_state = initial
            if final is not None:
                record.final_state = final

    def consume(self, branch_id: int, outcome: str, transcript_ref: Optional[int] = None) -> None:
        if outcome not in ("merged", "collapsed"):
            raise ValueError(f"outcome must be merged or collapsed, got {outcome!r}")
        with self._lock:
            record = self._accessible(branch_id)
            if record.status != "in_use":
                raise BranchError(f"branch {branch_id} is not in use")
            record.status = "consumed" if outcome == "merged" else "collapsed"
            record.transcript_ref = transcript_ref
            self._in_use = None

    def status(self, branch_id: int) -> str:
        with self._lock:
            if branch_id not in self._records:
                raise BranchError(f"unknown branch id {branch_id}")
            return self._records[branch_id].status

    def record(self, branch_id: int) -> _BranchRecord:
        """Raw record access; raises for consumed/collapsed branches."""
        with self._lock:
            return self._accessible(branch_id)

    def loop_closure_error(self, branch_id: int) -> float:
        """Trace distance between a merged branch's final and initial state."""
        with self._lock:
            if branch_id not in self._records:
                raise BranchError(f"unknown branch id {branch_id}")
            record = self._records[branch_id]
            if record.status != "consumed":
                raise BranchError(f"branch {branch_id} was not merged")
            if record.initial_state is None or record.final_state is None:
                raise BranchError(f"branch {branch_id} has no recorded loop states")
            return trace_distance(record.initial_state, record.final_state)

    def ids(self) -> tuple:
        with self._lock:
            return tuple(self._records)

    def summary(self) -> dict:
        with self._lock:
            return {str(bid): rec.status for bid, rec in self._records.items()}


def allocate_branch(ledger: BranchLedger) -> int:
    return ledger.allocate()


def consume_branch(ledger: BranchLedger, branch_id: int, outcome: str) -> BranchLedger:
    ledger.consume(branch_id, outcome)
    return ledger
