"""CFG construction, branch numbering, instrumentation round trips."""

import random

import pytest

from conftest import CORPUS_FILES, corpus_module, counter_seed
from veriloop import (
    BranchId,
    InputVector,
    InstrumentError,
    ast_equal,
    build_cfg,
    instrument,
    parse_module,
    run,
    run_module,
    strip_instrumentation,
)
from veriloop.vast import Case, If


def count_expected_edges(module) -> int:
    """Independent edge count: 2 per if, items+1 per case."""
    total = 0

    def walk(stmt):
        nonlocal total
        if isinstance(stmt, If):
            total += 2
            walk_block(stmt.then)
            if stmt.other is not None:
                walk_block(stmt.other)
        elif isinstance(stmt, Case):
            total += len(stmt.items) + 1
            for item in stmt.items:
                walk_block(item.body)
            if stmt.default is not None:
                walk_block(stmt.default)
        elif hasattr(stmt, "stmts"):
            walk_block(stmt)

    def walk_block(block):
        for s in block.stmts:
            walk(s)

    for proc in module.processes:
        walk_block(proc.body)
    return total


def test_counter_branch_numbering_matches_marker_layout():
    m = corpus_module("counter_buggy")
    cfg, bmap = build_cfg(m)
    assert [str(b) for b in bmap.branches()] == [f"B_{i}" for i in range(1, 8)]
    conds = {str(b): e.condition_text for b, e in bmap.entries.items()}
    assert conds["B_1"] == "reset"
    assert conds["B_2"] == "in == 8'h00"
    assert conds["B_3"] == "in == 8'h02"
    assert conds["B_4"] == "in == 8'hff"
    assert conds["B_5"] == "in != 8'h00 && in != 8'h02 && in != 8'hff"
    assert conds["B_6"] == "counter == 8'h01"
    assert conds["B_7"] == "!(counter == 8'h01)"
    # the non-leaf else arm of the reset if carries no number
    assert len(cfg.branch_edges()) == 8
    assert len(cfg.leaf_edges()) == 7


def test_unconditional_design_has_no_branches():
    cfg, bmap = build_cfg(corpus_module("dff"))
    assert len(bmap) == 0
    assert cfg.branch_edges() == []


def test_if_without_else_still_has_two_branches():
    cfg, bmap = build_cfg(corpus_module("hold_reg"))
    assert len(bmap) == 2
    kinds = [e.kind for e in cfg.branch_edges()]
    assert kinds == ["if-true", "if-false"]
    assert cfg.branch_edges()[1].implicit


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_edge_count_formula(path):
    module = parse_module(path.read_text())
    cfg, _ = build_cfg(module)
    assert len(cfg.branch_edges()) == count_expected_edges(module)


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_numbering_is_stable_across_reparses(path):
    src = path.read_text()
    _, a = build_cfg(parse_module(src))
    _, b = build_cfg(parse_module(src))
    assert a.to_json_dict() == b.to_json_dict()


def test_instrument_reproduces_handwritten_listing():
    raw = corpus_module("counter_buggy")
    design = instrument(raw)
    fixture = corpus_module("counter_buggy_instrumented")
    assert ast_equal(design.module, fixture)


def test_instrument_registers_and_hash():
    design = instrument(corpus_module("counter_buggy"))
    assert design.registers == [("counter", 8), ("out", 1)]
    assert len(design.design_hash) == 64


def test_instrument_rejects_instrumented_input():
    fixture = corpus_module("counter_buggy_instrumented")
    with pytest.raises(InstrumentError, match="already instrumented"):
        instrument(fixture)


def test_instrument_no_registers_no_log_process():
    m = parse_module("""
module comb_only (
    input  wire       sel,
    input  wire [3:0] a,
    output wire [3:0] y
);
    assign y = sel ? a : 4'h0;
endmodule
""")
    design = instrument(m)
    assert design.registers == []
    assert len(design.module.processes) == 0


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_strip_is_exact_inverse(path):
    module = parse_module(path.read_text())
    design = instrument(module)
    assert ast_equal(strip_instrumentation(design), module)


def test_strip_on_unmarked_module_is_identity():
    m = corpus_module("dff")
    assert ast_equal(strip_instrumentation(m), m)


def test_strip_handwritten_listing_drops_markers_and_log_process():
    fixture = corpus_module("counter_buggy_instrumented")
    stripped = strip_instrumentation(fixture)
    assert ast_equal(stripped, corpus_module("counter_buggy"))
    assert len(stripped.processes) == 1


@pytest.mark.parametrize("path", CORPUS_FILES, ids=lambda p: p.stem)
def test_instrumentation_preserves_behavior(path):
    """Spot check (the acceptance suite runs the full 100-vector version)."""
    module = parse_module(path.read_text())
    design = instrument(module)
    rng = random.Random(path.stem)
    ports = module.data_input_ports()
    for _ in range(10):
        vec = InputVector(tuple(
            {p.name: rng.randrange(1 << p.width) for p in ports}
            for _ in range(8)))
        raw = run_module(module, vec)
        inst = run(design, vec)
        assert [r.outputs for r in raw.records] == \
               [r.outputs for r in inst.records]


def test_branch_map_json_shape():
    design = instrument(corpus_module("counter_buggy"))
    data = design.branch_map.to_json_dict()
    assert set(data) == {f"B_{i}" for i in range(1, 8)}
    entry = data["B_2"]
    assert set(entry) == {"process", "line", "condition"}
    assert entry["process"] == 0
    assert isinstance(entry["line"], int)


def test_markers_land_at_block_ends():
    design = instrument(corpus_module("counter_buggy"))
    text = design.source
    seed_trace = run(design, counter_seed())
    assert [str(b) for r in seed_trace.records for b in r.branches] == \
        ["B_1", "B_2", "B_7", "B_2", "B_7"]
    for i in range(1, 8):
        assert f'$display("B_{i}");' in text
