"""Symbolic replay and branch mutation against frozen expected sets."""

import pytest

from conftest import corpus_design, counter_seed
from veriloop import BranchId, InputVector, run
from veriloop.symbolic import (
    MutationError,
    ReplayError,
    flip_constraint,
    flip_indices,
    mutate_branch,
    symbolic_replay,
)


def replay_counter(design, vec=None):
    vec = vec or counter_seed()
    trace = run(design, vec)
    return symbolic_replay(design, trace, vec)


def rendered(cs):
    return [c.render() for c in cs.constraints]


def test_cycle0_constraints(buggy_counter):
    rep = replay_counter(buggy_counter)
    cycle0 = [c for c in rep.path.constraints if c.cycle == 0]
    texts = [c.render() for c in cycle0]
    assert "reset_0 == 1" in texts
    assert "in_0 == 8'h00" in texts
    assert "counter_1 == 8'h00" in texts
    assert "out_1 == 0" in texts
    effects = [c for c in cycle0 if c.provenance.startswith("assignment-effect")]
    assert [c.render() for c in effects] == ["counter_1 == 8'h00", "out_1 == 0"]


def test_zero_cycle_replay(buggy_counter):
    vec = InputVector(())
    trace = run(buggy_counter, vec)
    rep = symbolic_replay(buggy_counter, trace, vec)
    assert rep.path.constraints == []
    assert rep.states == []


def test_cycle1_path_constraints(buggy_counter):
    rep = replay_counter(buggy_counter)
    cycle1 = [c.render() for c in rep.path.constraints
              if c.cycle == 1 and c.provenance.startswith("path-condition")]
    assert "reset_1 == 0" in cycle1
    assert "in_1 == 8'h00" in cycle1
    assert any("counter_1" in text for text in cycle1)  # the B_7 condition


def test_path_condition_satisfied_by_concrete_inputs(buggy_counter):
    rep = replay_counter(buggy_counter)
    assert rep.path.satisfied_by(rep.concrete)


def test_register_versions_track_trace(buggy_counter):
    rep = replay_counter(buggy_counter)
    assert rep.concrete["counter_1"] == 0x00
    assert rep.concrete["counter_2"] == 0xFF
    assert rep.concrete["counter_3"] == 0xFE


def test_mutate_case_arm_matches_figure_set(buggy_counter):
    rep = replay_counter(buggy_counter)
    cs = mutate_branch(rep, 1, BranchId(3))
    assert rendered(cs) == [
        "reset_0 == 1",
        "in_0 == 8'h00",
        "counter_1 == 8'h00",
        "out_1 == 0",
        "reset_1 == 0",
        "in_1 == 8'h02",
    ]
    assert cs.constraints[-1].provenance == "mutation-target"


def test_mutate_first_decision_drops_everything(buggy_counter):
    rep = replay_counter(buggy_counter)
    else_edge = buggy_counter.branch_map.edge(BranchId(1)).decision.edges[1]
    cs = mutate_branch(rep, 0, else_edge)
    assert rendered(cs) == ["reset_0 == 0"]


def test_mutate_case_default_is_disequality_conjunction(buggy_counter):
    rep = replay_counter(buggy_counter)
    cs = mutate_branch(rep, 1, BranchId(5))
    tail = rendered(cs)[-3:]
    assert tail == ["in_1 != 8'h00", "in_1 != 8'h02", "in_1 != 8'hff"]


def test_mutate_unreachable_target_is_error(buggy_counter):
    rep = replay_counter(buggy_counter)
    with pytest.raises(MutationError, match="not an alternative"):
        mutate_branch(rep, 0, BranchId(6))


def test_mutate_taken_branch_is_error(buggy_counter):
    rep = replay_counter(buggy_counter)
    with pytest.raises(MutationError, match="already taken"):
        mutate_branch(rep, 1, BranchId(2))


def test_mutation_soundness_on_directed_vector(buggy_counter):
    """Any satisfying assignment of the mutated set drives the target."""
    from veriloop.concolic import build_directed_vector
    from veriloop.solver import solve

    rep = replay_counter(buggy_counter)
    for target_cycle, branch in [(1, BranchId(3)), (1, BranchId(4)),
                                 (1, BranchId(5)), (2, BranchId(3))]:
        cs = mutate_branch(rep, target_cycle, branch)
        result = solve(cs)
        assert result.is_sat, f"{branch}@{target_cycle}"
        vec, _ = build_directed_vector(buggy_counter, result.assignment,
                                       counter_seed(), 3)
        trace = run(buggy_counter, vec)
        assert branch in trace.records[target_cycle].branches


def test_trace_design_mismatch_detected(buggy_counter, fixed_counter):
    vec = counter_seed()
    trace = run(buggy_counter, vec)
    with pytest.raises(ReplayError, match="hash"):
        symbolic_replay(fixed_counter, trace, vec)


def test_trace_branch_mismatch_detected(buggy_counter):
    vec = counter_seed()
    trace = run(buggy_counter, vec)
    other = InputVector(({"reset": 0, "in": 0},) * 3)
    import dataclasses
    forged = dataclasses.replace(trace)
    with pytest.raises(ReplayError, match="trace/design mismatch"):
        symbolic_replay(buggy_counter, forged, other)


def test_comb_process_constraints_inline_next_state(fixed_counter):
    vec = InputVector(({"reset": 1, "in": 0}, {"reset": 0, "in": 2},
                       {"reset": 0, "in": 0}))
    trace = run(fixed_counter, vec)
    rep = symbolic_replay(fixed_counter, trace, vec)
    texts = rendered(rep.path)
    # the clocked output check references the inlined comb expression,
    # not an auxiliary variable
    assert any("(counter_1 + 8'h01) == 8'h01" in t for t in texts)
    assert not any("next_counter" in t for t in texts)
    assert rep.path.satisfied_by(rep.concrete)


def test_symbolic_state_snapshot_per_cycle(buggy_counter):
    rep = replay_counter(buggy_counter)
    assert len(rep.states) == 3
    from veriloop.symbolic import SConst, render_sym
    assert isinstance(rep.states[0]["counter"], SConst)  # initial zero
    assert render_sym(rep.states[1]["counter"]) == "counter_1"
    assert render_sym(rep.states[2]["counter"]) == "counter_2"


def test_shift_amounts_are_concretized_with_note():
    design = corpus_design("shifter")
    vec = InputVector(({"in": 0x0F, "amt": 3},))
    trace = run(design, vec)
    rep = symbolic_replay(design, trace, vec)
    notes = [c for c in rep.path.constraints if c.note == "concretized"]
    assert notes, "symbolic shift amount should be pinned"
    assert all(c.holds(rep.concrete) for c in notes)


def test_ternary_conditions_are_pinned_and_flippable():
    design = corpus_design("fsm_seq")
    vec = InputVector(({"reset": 1, "in": 0}, {"reset": 0, "in": 0}))
    trace = run(design, vec)
    rep = symbolic_replay(design, trace, vec)
    flips = flip_indices(rep.path)
    assert flips, "ternary condition should be a flip point"
    from veriloop.solver import solve
    cs = flip_constraint(rep, flips[0])
    result = solve(cs)
    assert result.is_sat
    assert result.assignment["in_1"] == 1
