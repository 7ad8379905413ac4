"""Pretty-printer: AST back to parseable Verilog text.

Round-trip contract: ``parse_module(pretty_print(m))`` is structurally
equal to ``m``.
"""

from __future__ import annotations

from .vast import (
    AstModule,
    Binary,
    BitSelect,
    Block,
    BlockingAssign,
    Case,
    Concat,
    ContAssign,
    Display,
    Expr,
    Ident,
    If,
    Literal,
    NonBlockingAssign,
    PartSelect,
    Process,
    Stmt,
    Ternary,
    Unary,
)

_IND = "    "

# Higher binds tighter; mirrors the parser's tiers.
_TIER = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9,
}


def format_literal(lit: Literal) -> str:
    if not lit.sized:
        return str(lit.value)
    if lit.base == "h":
        digits = (lit.width + 3) // 4
        return f"{lit.width}'h{lit.value:0{digits}x}"
    if lit.base == "b":
        return f"{lit.width}'b{lit.value:0{lit.width}b}"
    return f"{lit.width}'d{lit.value}"


def format_expr(expr: Expr, parent_tier: int = 0) -> str:
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Literal):
        return format_literal(expr)
    if isinstance(expr, Unary):
        return f"{expr.op}{format_expr(expr.operand, 10)}"
    if isinstance(expr, Binary):
        tier = _TIER[expr.op]
        text = (f"{format_expr(expr.lhs, tier)} {expr.op} "
                f"{format_expr(expr.rhs, tier + 1)}")
        return f"({text})" if tier < parent_tier else text
    if isinstance(expr, Ternary):
        text = (f"{format_expr(expr.cond, 1)} ? {format_expr(expr.then)}"
                f" : {format_expr(expr.other)}")
        return f"({text})" if parent_tier > 0 else text
    if isinstance(expr, BitSelect):
        return f"{expr.base.name}[{format_expr(expr.index)}]"
    if isinstance(expr, PartSelect):
        return f"{expr.base.name}[{expr.msb}:{expr.lsb}]"
    if isinstance(expr, Concat):
        return "{" + ", ".join(format_expr(p) for p in expr.parts) + "}"
    raise TypeError(f"unknown expression node {expr!r}")


def _emit_block(block: Block, indent: int, out: list[str]) -> None:
    pad = _IND * indent
    if len(block.stmts) == 1 and not block.braced:
        _emit_stmt(block.stmts[0], indent, out)
        return
    out.append(f"{pad}begin")
    for stmt in block.stmts:
        _emit_stmt(stmt, indent + 1, out)
    out.append(f"{pad}end")


def _emit_stmt(stmt: Stmt, indent: int, out: list[str]) -> None:
    pad = _IND * indent
    if isinstance(stmt, Block):
        out.append(f"{pad}begin")
        for s in stmt.stmts:
            _emit_stmt(s, indent + 1, out)
        out.append(f"{pad}end")
    elif isinstance(stmt, BlockingAssign):
        out.append(f"{pad}{format_expr(stmt.target)} = {format_expr(stmt.rhs)};")
    elif isinstance(stmt, NonBlockingAssign):
        out.append(f"{pad}{format_expr(stmt.target)} <= {format_expr(stmt.rhs)};")
    elif isinstance(stmt, If):
        out.append(f"{pad}if ({format_expr(stmt.cond)})")
        _emit_block(stmt.then, indent, out)
        if stmt.other is not None:
            out.append(f"{pad}else")
            _emit_block(stmt.other, indent, out)
    elif isinstance(stmt, Case):
        out.append(f"{pad}case ({format_expr(stmt.subject)})")
        for item in stmt.items:
            out.append(f"{pad}{_IND}{format_literal(item.label)}:")
            _emit_block(item.body, indent + 2, out)
        if stmt.default is not None:
            out.append(f"{pad}{_IND}default:")
            _emit_block(stmt.default, indent + 2, out)
        out.append(f"{pad}endcase")
    elif isinstance(stmt, Display):
        args = "".join(f", {format_expr(a)}" for a in stmt.args)
        out.append(f'{pad}$display("{stmt.text}"{args});')
    else:
        raise TypeError(f"unknown statement node {stmt!r}")


def pretty_print(module: AstModule) -> str:
    out: list[str] = []
    out.append(f"module {module.name} (")
    for i, port in enumerate(module.ports):
        kind = "reg " if port.is_reg else "wire"
        rng = f"[{port.width - 1}:0] " if port.width > 1 else ""
        comma = "," if i + 1 < len(module.ports) else ""
        out.append(f"{_IND}{port.direction:<6} {kind} {rng}{port.name}{comma}")
    out.append(");")
    out.append("")
    for net in module.nets:
        rng = f"[{net.width - 1}:0] " if net.width > 1 else ""
        out.append(f"{_IND}{net.kind} {rng}{net.name};")
    if module.nets:
        out.append("")
    for ca in module.continuous_assigns:
        out.append(f"{_IND}assign {format_expr(ca.target)} = {format_expr(ca.rhs)};")
    if module.continuous_assigns:
        out.append("")
    for proc in module.processes:
        trigger = f"posedge {proc.clock}" if proc.trigger == "posedge" else "*"
        out.append(f"{_IND}always @({trigger})")
        _emit_block(proc.body, 1, out)
        out.append("")
    out.append("endmodule")
    return "\n".join(out) + "\n"
