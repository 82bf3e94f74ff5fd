from itertools import combinations

import numpy as np
import pytest

from ctcsim.protocol import ProtocolConfig, run_session
from ctcsim.states import StateVector
from ctcsim.topology import (
    BranchError,
    BranchLedger,
    EventPoint,
    TopologySpace,
    allocate_branch,
    build_line_splitting,
    consume_branch,
    is_hausdorff,
    validate_topology,
)

RNG = np.random.default_rng(2026)


def brute_force_hausdorff(space):
    """Oracle: try every pair of opens for every pair of points."""
    for x, y in combinations(space.points, 2):
        separated = False
        for o1 in space.opens:
            for o2 in space.opens:
                if x in o1 and y in o2 and not (o1 & o2):
                    separated = True
        if not separated:
            return False
    return True


def random_topology(rng, max_points=6):
    count = int(rng.integers(2, max_points + 1))
    points = [f"p{i}" for i in range(count)]
    num_generators = int(rng.integers(1, 4))
    subbasis = []
    for _ in range(num_generators):
        mask = rng.random(count) < 0.5
        subbasis.append([p for p, m in zip(points, mask) if m])
    return TopologySpace.from_subbasis(points, subbasis)


# ------------------------------------------------------------------- validate


def test_discrete_topology_is_valid():
    ok, violations = validate_topology(TopologySpace.discrete(["a", "b", "c"]))
    assert ok and violations == []


def test_missing_full_set_is_reported():
    space = TopologySpace(["a", "b"], [[], ["a"]])
    ok, violations = validate_topology(space)
    assert not ok
    assert any("full point set" in v for v in violations)


def test_union_gap_is_reported():
    space = TopologySpace(["a", "b", "c"], [[], ["a"], ["b"], ["a", "b", "c"]])
    ok, violations = validate_topology(space)
    assert not ok
    assert any("union" in v for v in violations)


def test_generated_topology_validates():
    space = TopologySpace.from_subbasis(
        ["0_1", "0_2", "-1", "+1"],
        [["-1"], ["+1"], ["-1", "0_1", "+1"], ["-1", "0_2", "+1"]],
    )
    ok, violations = validate_topology(space)
    assert ok, violations


def test_space_rejects_unknown_points_in_opens():
    with pytest.raises(ValueError):
        TopologySpace(["a"], [["a", "z"]])


# ---------------------------------------------------------------- is_hausdorff


def test_discrete_four_points_is_hausdorff():
    ok, witness = is_hausdorff(TopologySpace.discrete(["a", "b", "c", "d"]))
    assert ok and witness is None


def test_indiscrete_pair_is_not_hausdorff():
    ok, witness = is_hausdorff(TopologySpace.indiscrete(["x", "y"]))
    assert not ok
    assert set(witness) == {"x", "y"}


def test_doubled_origin_model_witness():
    space = TopologySpace.from_subbasis(
        ["0_1", "0_2", "-1", "+1"],
        [["-1"], ["+1"], ["-1", "0_1", "+1"], ["-1", "0_2", "+1"]],
    )
    ok, witness = is_hausdorff(space)
    assert not ok
    assert witness == ("0_1", "0_2")
    # oracle agrees that no separation exists anywhere
    assert brute_force_hausdorff(space) is False


def test_is_hausdorff_rejects_invalid_space():
    with pytest.raises(ValueError):
        is_hausdorff(TopologySpace(["a", "b"], [["a"]]))


def test_checker_agrees_with_brute_force_oracle():
    for _ in range(50):
        space = random_topology(RNG)
        assert is_hausdorff(space)[0] == brute_force_hausdorff(space)


# ------------------------------------------------------------- line splitting


def test_line_splitting_two_copies_is_doubled_origin_model():
    built = build_line_splitting(2)
    explicit = TopologySpace.from_subbasis(
        ["0_1", "0_2", "-1", "+1"],
        [["-1"], ["+1"], ["-1", "0_1", "+1"], ["-1", "0_2", "+1"]],
    )
    assert set(built.points) == set(explicit.points)
    assert set(built.opens) == set(explicit.opens)


@pytest.mark.parametrize("copies", [2, 3, 4, 5, 6])
def test_line_splitting_never_hausdorff_with_branch_witness(copies):
    space = build_line_splitting(copies)
    ok, witness = is_hausdorff(space)
    assert not ok
    assert all(w.startswith("0_") for w in witness)


def test_line_splitting_branch_points_pairwise_non_separable():
    space = build_line_splitting(3)
    branch_points = [p for p in space.points if p.startswith("0_")]
    for x, y in combinations(branch_points, 2):
        separable = any(
            x in o1 and y in o2 and not (o1 & o2)
            for o1 in space.opens
            for o2 in space.opens
        )
        assert not separable


def test_line_splitting_charts_are_open():
    space = build_line_splitting(3)
    for bp in ("0_1", "0_2", "0_3"):
        assert frozenset({"-1", bp, "+1"}) in set(space.opens)


def test_one_branch_subspace_keeps_branch_point_entangled_with_past():
    # a finite space is Hausdorff only if discrete; the branch chart keeps
    # the past inside every neighborhood of the branch point, so the
    # subspace of one branch is still not Hausdorff at the branch point
    space = build_line_splitting(2)
    sub = space.subspace(["-1", "0_1", "+1"])
    ok, witness = is_hausdorff(sub)
    assert not ok
    assert "0_1" in witness
    # away from the branch point the subspace is discrete, hence Hausdorff
    regular = space.subspace(["-1", "+1"])
    assert is_hausdorff(regular) == (True, None)


def test_line_splitting_requires_two_copies():
    with pytest.raises(ValueError):
        build_line_splitting(1)


def test_topology_json_round_trip():
    space = build_line_splitting(2)
    again = TopologySpace.from_json(space.to_json())
    assert set(space.opens) == set(again.opens)
    assert space.points == again.points


# ---------------------------------------------------------------- branch ledger


def test_allocate_and_consume_lifecycle():
    ledger = BranchLedger()
    first = allocate_branch(ledger)
    assert ledger.status(first) == "in_use"
    consume_branch(ledger, first, "merged")
    assert ledger.status(first) == "consumed"
    second = allocate_branch(ledger)
    assert second != first


def test_single_branch_in_use():
    ledger = BranchLedger()
    allocate_branch(ledger)
    with pytest.raises(BranchError):
        allocate_branch(ledger)


def test_consumed_branch_rejects_all_access():
    ledger = BranchLedger()
    bid = allocate_branch(ledger)
    consume_branch(ledger, bid, "collapsed")
    with pytest.raises(BranchError):
        ledger.touch(bid)
    with pytest.raises(BranchError):
        ledger.set_states(bid, initial=None)
    with pytest.raises(BranchError):
        ledger.record(bid)
    with pytest.raises(BranchError):
        consume_branch(ledger, bid, "merged")


def test_unknown_branch_errors():
    ledger = BranchLedger()
    with pytest.raises(BranchError):
        ledger.status(5)
    with pytest.raises(BranchError):
        ledger.consume(5, "merged")


def test_branch_ids_never_reused():
    ledger = BranchLedger()
    seen = set()
    for _ in range(25):
        bid = ledger.allocate()
        assert bid not in seen
        seen.add(bid)
        ledger.consume(bid, "merged" if bid % 2 else "collapsed")
    assert len(seen) == 25


def test_event_points_order():
    ledger = BranchLedger()
    bid = ledger.allocate(p_order=3, q_order=9)
    record = ledger.record(bid)
    assert record.p_event == EventPoint("P", bid, 3)
    assert record.q_event == EventPoint("Q", bid, 9)


def test_event_point_label_validation():
    with pytest.raises(ValueError):
        EventPoint("R", 0, 0)


def test_invalid_consume_outcome():
    ledger = BranchLedger()
    bid = ledger.allocate()
    with pytest.raises(ValueError):
        ledger.consume(bid, "vanished")


def test_merged_branch_loop_closure_error_is_zero():
    ledger = BranchLedger()
    cfg = ProtocolConfig(input_state=StateVector.qubit(0.6, 0.8), seed=4)
    transcript = run_session(cfg, ledger)
    assert not transcript.collapse_flag
    assert ledger.loop_closure_error(transcript.branch_id) <= 1e-12


def test_collapsed_branch_has_no_closure_error():
    ledger = BranchLedger()
    cfg = ProtocolConfig(input_state=StateVector.qubit(0.6, 0.8), scenario="bob_skips", seed=4)
    transcript = run_session(cfg, ledger)
    with pytest.raises(BranchError):
        ledger.loop_closure_error(transcript.branch_id)


def test_sequential_sessions_allocate_distinct_branches():
    ledger = BranchLedger()
    ids = []
    for seed in range(10):
        cfg = ProtocolConfig(input_state=StateVector.qubit(0.6, 0.8), seed=seed)
        ids.append(run_session(cfg, ledger).branch_id)
    assert len(set(ids)) == 10
