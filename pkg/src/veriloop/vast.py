"""AST for the synthesizable Verilog subset.

Nodes carry a :class:`SourcePos` for diagnostics and an inferred ``width``
(filled in by the parser's resolver pass).  Structural equality deliberately
ignores positions, literal bases, and begin/end bracing: two parses of the
same design compare equal even after pretty-printing.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourcePos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


UNSIZED_WIDTH = 32
MAX_WIDTH = 64

UNARY_OPS = ("~", "!", "-")
BINARY_OPS = (
    "+", "-", "&", "|", "^",
    "==", "!=", "<", "<=", ">", ">=",
    "<<", ">>", "&&", "||",
)
COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")
LOGICAL_OPS = ("&&", "||")


# ---------------------------------------------------------------------------
# Expressions


@dataclass(eq=False)
class Expr:
    pos: SourcePos = field(repr=False)
    width: int = field(default=0, repr=False)


@dataclass(eq=False)
class Ident(Expr):
    name: str = ""


@dataclass(eq=False)
class Literal(Expr):
    value: int = 0
    base: str = "d"      # presentation only: b/d/h
    sized: bool = True   # False for bare decimals, which take UNSIZED_WIDTH


@dataclass(eq=False)
class Unary(Expr):
    op: str = ""
    operand: Expr | None = None


@dataclass(eq=False)
class Binary(Expr):
    op: str = ""
    lhs: Expr | None = None
    rhs: Expr | None = None


@dataclass(eq=False)
class Ternary(Expr):
    cond: Expr | None = None
    then: Expr | None = None
    other: Expr | None = None


@dataclass(eq=False)
class BitSelect(Expr):
    base: Ident | None = None
    index: Expr | None = None


@dataclass(eq=False)
class PartSelect(Expr):
    base: Ident | None = None
    msb: int = 0
    lsb: int = 0


@dataclass(eq=False)
class Concat(Expr):
    parts: list[Expr] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Statements


@dataclass(eq=False)
class Stmt:
    pos: SourcePos = field(repr=False)


@dataclass(eq=False)
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)
    braced: bool = True  # had explicit begin/end in source; presentation only


@dataclass(eq=False)
class BlockingAssign(Stmt):
    target: Expr | None = None
    rhs: Expr | None = None


@dataclass(eq=False)
class NonBlockingAssign(Stmt):
    target: Expr | None = None
    rhs: Expr | None = None


@dataclass(eq=False)
class If(Stmt):
    cond: Expr | None = None
    then: Block | None = None
    other: Block | None = None  # None when there is no else arm


@dataclass(eq=False)
class CaseItem:
    label: Literal
    body: Block
    pos: SourcePos


@dataclass(eq=False)
class Case(Stmt):
    subject: Expr | None = None
    items: list[CaseItem] = field(default_factory=list)
    default: Block | None = None
    default_pos: SourcePos | None = None


@dataclass(eq=False)
class Display(Stmt):
    text: str = ""
    args: list[Expr] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Module-level items


@dataclass(frozen=True)
class Port:
    name: str
    direction: str  # "input" | "output"
    width: int
    is_reg: bool = False


@dataclass(frozen=True)
class Net:
    name: str
    kind: str  # "wire" | "reg"
    width: int


@dataclass(eq=False)
class Process:
    trigger: str            # "posedge" | "comb"
    clock: str | None       # clock identifier for posedge processes
    body: Block
    pos: SourcePos


@dataclass(eq=False)
class ContAssign:
    target: Expr
    rhs: Expr
    pos: SourcePos


@dataclass(eq=False)
class AstModule:
    name: str
    ports: list[Port]
    nets: list[Net]
    processes: list[Process]
    continuous_assigns: list[ContAssign]

    def input_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "input"]

    def output_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "output"]

    def clock_name(self) -> str | None:
        for proc in self.processes:
            if proc.trigger == "posedge":
                return proc.clock
        return None

    def data_input_ports(self) -> list[Port]:
        """Input ports excluding the implicit clock."""
        clk = self.clock_name()
        return [p for p in self.input_ports() if p.name != clk]

    def width_of(self, name: str) -> int | None:
        for p in self.ports:
            if p.name == name:
                return p.width
        for n in self.nets:
            if n.name == name:
                return n.width
        return None

    def is_reg(self, name: str) -> bool:
        for n in self.nets:
            if n.name == name:
                return n.kind == "reg"
        for p in self.ports:
            if p.name == name:
                return p.is_reg
        return False

    def registers(self) -> list[tuple[str, int]]:
        """All reg storage: body-declared regs first, then output regs.

        This is the snapshot order used by instrumentation and traces.
        """
        regs = [(n.name, n.width) for n in self.nets if n.kind == "reg"]
        regs += [(p.name, p.width) for p in self.ports if p.is_reg]
        return regs


# ---------------------------------------------------------------------------
# Structural equality


def structural_key(node):
    """Nested-tuple form of a node, ignoring positions and presentation."""
    if node is None:
        return None
    if isinstance(node, Ident):
        return ("id", node.name)
    if isinstance(node, Literal):
        return ("lit", node.width, node.value)
    if isinstance(node, Unary):
        return ("un", node.op, structural_key(node.operand))
    if isinstance(node, Binary):
        return ("bin", node.op, structural_key(node.lhs), structural_key(node.rhs))
    if isinstance(node, Ternary):
        return ("tern", structural_key(node.cond), structural_key(node.then),
                structural_key(node.other))
    if isinstance(node, BitSelect):
        return ("bits", structural_key(node.base), structural_key(node.index))
    if isinstance(node, PartSelect):
        return ("parts", structural_key(node.base), node.msb, node.lsb)
    if isinstance(node, Concat):
        return ("cat", tuple(structural_key(p) for p in node.parts))
    if isinstance(node, Block):
        return ("blk", tuple(structural_key(s) for s in node.stmts))
    if isinstance(node, BlockingAssign):
        return ("=", structural_key(node.target), structural_key(node.rhs))
    if isinstance(node, NonBlockingAssign):
        return ("<=", structural_key(node.target), structural_key(node.rhs))
    if isinstance(node, If):
        return ("if", structural_key(node.cond), structural_key(node.then),
                structural_key(node.other))
    if isinstance(node, CaseItem):
        return ("item", structural_key(node.label), structural_key(node.body))
    if isinstance(node, Case):
        return ("case", structural_key(node.subject),
                tuple(structural_key(i) for i in node.items),
                structural_key(node.default))
    if isinstance(node, Display):
        return ("disp", node.text, tuple(structural_key(a) for a in node.args))
    if isinstance(node, Process):
        return ("proc", node.trigger, node.clock, structural_key(node.body))
    if isinstance(node, ContAssign):
        return ("assign", structural_key(node.target), structural_key(node.rhs))
    if isinstance(node, AstModule):
        return ("module", node.name, tuple(node.ports), tuple(node.nets),
                tuple(structural_key(p) for p in node.processes),
                tuple(structural_key(a) for a in node.continuous_assigns))
    raise TypeError(f"not an AST node: {node!r}")


def ast_equal(a, b) -> bool:
    return structural_key(a) == structural_key(b)
