"""Per-process control-flow graphs with uniquely numbered branches.

Every ``if`` contributes a true and a false edge (an implicit empty else
still counts), every ``case`` one edge per item plus a default edge
(implicit when absent).  Only *leaf* arms — arms whose body contains no
further branching — receive a ``B_<n>`` identifier and, later, a display
marker; an arm that immediately splits again is evidenced by its nested
markers.  Numbering is a pre-order walk: processes in declaration order,
statements in textual order, if-true before if-false, case items before
the default.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .printer import format_expr, format_literal
from .vast import (
    AstModule,
    Block,
    Case,
    Expr,
    If,
    Literal,
    SourcePos,
    Stmt,
)


@dataclass(frozen=True, order=True)
class BranchId:
    ordinal: int

    def __post_init__(self):
        if self.ordinal < 1:
            raise ValueError("branch ordinals start at 1")

    def __str__(self) -> str:
        return f"B_{self.ordinal}"

    @classmethod
    def parse(cls, text: str) -> "BranchId":
        if not text.startswith("B_"):
            raise ValueError(f"not a branch id: {text!r}")
        return cls(int(text[2:]))


@dataclass(eq=False)
class Edge:
    process_index: int
    decision: "Decision"
    kind: str                  # if-true | if-false | case-item | case-default
    address: tuple             # structural address, stable across re-parses
    block: Block | None        # None for implicit (materialized-empty) arms
    label: Literal | None = None
    leaf: bool = False
    branch: BranchId | None = None
    pos: SourcePos = SourcePos(1, 1)
    condition_text: str = ""

    @property
    def implicit(self) -> bool:
        return self.block is None

    def siblings(self) -> list["Edge"]:
        return [e for e in self.decision.edges if e is not self]


@dataclass(eq=False)
class Decision:
    kind: str                  # "if" | "case"
    process_index: int
    address: tuple
    stmt: Stmt
    subject: Expr              # if condition or case subject
    pos: SourcePos
    edges: list[Edge] = field(default_factory=list)


@dataclass(eq=False)
class Cfg:
    module: AstModule
    decisions: list[Decision] = field(default_factory=list)

    def branch_edges(self) -> list[Edge]:
        return [e for d in self.decisions for e in d.edges]

    def leaf_edges(self) -> list[Edge]:
        return [e for e in self.branch_edges() if e.leaf]

    def edge_at(self, address: tuple) -> Edge | None:
        for e in self.branch_edges():
            if e.address == address:
                return e
        return None


@dataclass(frozen=True)
class BranchEntry:
    branch: BranchId
    process_index: int
    pos: SourcePos
    condition_text: str
    address: tuple


class BranchMap:
    """Bijection between branch ids and leaf branch edges."""

    def __init__(self):
        self.entries: dict[BranchId, BranchEntry] = {}
        self._edges: dict[BranchId, Edge] = {}

    def add(self, edge: Edge) -> None:
        assert edge.branch is not None
        self.entries[edge.branch] = BranchEntry(
            edge.branch, edge.process_index, edge.pos, edge.condition_text,
            edge.address)
        self._edges[edge.branch] = edge

    def edge(self, branch: BranchId) -> Edge:
        return self._edges[branch]

    def branches(self) -> list[BranchId]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, branch: BranchId) -> bool:
        return branch in self.entries

    def to_json_dict(self) -> dict:
        return {
            str(b): {
                "process": e.process_index,
                "line": e.pos.line,
                "condition": e.condition_text,
            }
            for b, e in sorted(self.entries.items())
        }


def _block_branches(block: Block | None) -> bool:
    """True when the statement list contains any if/case at any depth."""
    if block is None:
        return False
    for stmt in block.stmts:
        if isinstance(stmt, (If, Case)):
            return True
        if isinstance(stmt, Block) and _block_branches(stmt):
            return True
    return False


def _default_condition_text(case: Case) -> str:
    subject = format_expr(case.subject)
    if not case.items:
        return f"{subject}: default"
    return " && ".join(f"{subject} != {format_literal(i.label)}"
                       for i in case.items)


class _Builder:
    def __init__(self, module: AstModule):
        self.cfg = Cfg(module)
        self.branch_map = BranchMap()
        self.next_ordinal = 1

    def number(self, edge: Edge) -> None:
        if edge.leaf:
            edge.branch = BranchId(self.next_ordinal)
            self.next_ordinal += 1
            self.branch_map.add(edge)

    def walk_block(self, block: Block, proc_idx: int, address: tuple) -> None:
        for i, stmt in enumerate(block.stmts):
            here = address + (i,)
            if isinstance(stmt, If):
                self.visit_if(stmt, proc_idx, here)
            elif isinstance(stmt, Case):
                self.visit_case(stmt, proc_idx, here)
            elif isinstance(stmt, Block):
                self.walk_block(stmt, proc_idx, here)

    def visit_if(self, stmt: If, proc_idx: int, address: tuple) -> None:
        decision = Decision("if", proc_idx, address, stmt, stmt.cond, stmt.pos)
        cond_text = format_expr(stmt.cond)
        true_edge = Edge(proc_idx, decision, "if-true", address + ("t",),
                         stmt.then, leaf=not _block_branches(stmt.then),
                         pos=stmt.then.pos, condition_text=cond_text)
        false_pos = stmt.other.pos if stmt.other is not None else stmt.pos
        false_edge = Edge(proc_idx, decision, "if-false", address + ("f",),
                          stmt.other, leaf=not _block_branches(stmt.other),
                          pos=false_pos, condition_text=f"!({cond_text})")
        decision.edges = [true_edge, false_edge]
        self.cfg.decisions.append(decision)

        self.number(true_edge)
        if not true_edge.leaf:
            self.walk_block(stmt.then, proc_idx, address + ("t",))
        self.number(false_edge)
        if not false_edge.leaf:
            self.walk_block(stmt.other, proc_idx, address + ("f",))

    def visit_case(self, stmt: Case, proc_idx: int, address: tuple) -> None:
        decision = Decision("case", proc_idx, address, stmt, stmt.subject,
                            stmt.pos)
        subject_text = format_expr(stmt.subject)
        edges: list[Edge] = []
        for k, item in enumerate(stmt.items):
            edges.append(Edge(
                proc_idx, decision, "case-item", address + (("i", k),),
                item.body, label=item.label,
                leaf=not _block_branches(item.body), pos=item.pos,
                condition_text=f"{subject_text} == {format_literal(item.label)}"))
        default_pos = stmt.default_pos or stmt.pos
        edges.append(Edge(
            proc_idx, decision, "case-default", address + ("d",),
            stmt.default, leaf=not _block_branches(stmt.default),
            pos=default_pos, condition_text=_default_condition_text(stmt)))
        decision.edges = edges
        self.cfg.decisions.append(decision)

        for edge in edges:
            self.number(edge)
            if not edge.leaf:
                arm_addr = edge.address
                self.walk_block(edge.block, proc_idx, arm_addr)


def build_cfg(module: AstModule) -> tuple[Cfg, BranchMap]:
    builder = _Builder(module)
    for proc_idx, proc in enumerate(module.processes):
        builder.walk_block(proc.body, proc_idx, (proc_idx,))
    return builder.cfg, builder.branch_map
