"""Recursive-descent parser and resolver for the Verilog subset.

The accepted subset: one module per buffer, ANSI port lists, wire/reg nets
up to 64 bits, ``always @(posedge clk)`` and ``always @(*)`` processes,
if/else, case/default, begin/end, blocking and non-blocking assigns,
continuous assigns, ``$display`` calls, and the operator set in
:mod:`veriloop.vast`.  Everything else is rejected with a named
"unsupported:" diagnostic.

The resolver pass checks identifier resolution, driver uniqueness, clock
discipline, and annotates every expression with its inferred width:
arithmetic/bitwise results take the max operand width, comparisons and
logical operators are 1 bit wide, shifts keep the left operand's width,
and unsized literals are 32 bits.
"""

from __future__ import annotations

from .diagnostics import Diagnostic, ParseError
from .lexer import Token, tokenize
from .vast import (
    MAX_WIDTH,
    UNSIZED_WIDTH,
    AstModule,
    Binary,
    BitSelect,
    Block,
    BlockingAssign,
    Case,
    CaseItem,
    Concat,
    ContAssign,
    Display,
    Expr,
    Ident,
    If,
    Literal,
    Net,
    NonBlockingAssign,
    PartSelect,
    Port,
    Process,
    SourcePos,
    Stmt,
    Ternary,
    Unary,
)

# Binary operators by ascending precedence tier.
_PRECEDENCE = [
    ["||"],
    ["&&"],
    ["|"],
    ["^"],
    ["&"],
    ["==", "!="],
    ["<", "<=", ">", ">="],
    ["<<", ">>"],
    ["+", "-"],
]


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> Token:
        tok = self.peek()
        if self.at(kind, text):
            return self.next()
        wanted = what or (text if text is not None else kind)
        if tok.kind == "eof":
            raise self.error(tok.pos, f"unexpected end of input, expected '{wanted}'")
        raise self.error(tok.pos, f"expected '{wanted}', found '{tok.text}'")

    def error(self, pos: SourcePos, message: str) -> ParseError:
        return ParseError([Diagnostic(pos, message)])

    # -- grammar -----------------------------------------------------------

    def parse_module(self) -> AstModule:
        if self.at("eof"):
            raise self.error(self.peek().pos, "empty input, expected 'module'")
        self.expect("kw", "module")
        name = self.expect("id").text
        ports: list[Port] = []
        self.expect("punct", "(")
        if not self.at("punct", ")"):
            ports.append(self.parse_port())
            while self.at("punct", ","):
                self.next()
                ports.append(self.parse_port())
        self.expect("punct", ")")
        self.expect("punct", ";")

        nets: list[Net] = []
        processes: list[Process] = []
        assigns: list[ContAssign] = []
        while not self.at("kw", "endmodule"):
            tok = self.peek()
            if tok.kind == "eof":
                raise self.error(tok.pos, "unexpected end of input, expected 'endmodule'")
            if self.at("kw", "wire") or self.at("kw", "reg"):
                nets.extend(self.parse_net_decl())
            elif self.at("kw", "assign"):
                assigns.append(self.parse_cont_assign())
            elif self.at("kw", "always"):
                processes.append(self.parse_process())
            else:
                raise self.error(tok.pos, f"unexpected '{tok.text}' at module level")
        self.expect("kw", "endmodule")
        tok = self.peek()
        if tok.kind != "eof":
            raise self.error(tok.pos, f"trailing input after 'endmodule': '{tok.text}'")
        return AstModule(name, ports, nets, processes, assigns)

    def parse_range_width(self) -> int:
        pos = self.expect("punct", "[").pos
        msb = self.expect("num").value
        self.expect("punct", ":")
        lsb = self.expect("num").value
        self.expect("punct", "]")
        if lsb != 0:
            raise self.error(pos, "unsupported: non-zero LSB in range")
        width = msb + 1
        if width < 1 or width > MAX_WIDTH:
            raise self.error(pos, f"net width {width} outside 1..{MAX_WIDTH}")
        return width

    def parse_port(self) -> Port:
        tok = self.peek()
        if not (self.at("kw", "input") or self.at("kw", "output")):
            raise self.error(tok.pos, f"expected port direction, found '{tok.text}'")
        direction = self.next().text
        is_reg = False
        if self.at("kw", "wire"):
            self.next()
        elif self.at("kw", "reg"):
            self.next()
            is_reg = True
        width = 1
        if self.at("punct", "["):
            width = self.parse_range_width()
        name = self.expect("id").text
        if direction == "input" and is_reg:
            raise self.error(tok.pos, f"input port '{name}' cannot be reg")
        return Port(name, direction, width, is_reg)

    def parse_net_decl(self) -> list[Net]:
        kind = self.next().text
        width = 1
        if self.at("punct", "["):
            width = self.parse_range_width()
        nets = [Net(self.expect("id").text, kind, width)]
        while self.at("punct", ","):
            self.next()
            nets.append(Net(self.expect("id").text, kind, width))
        self.expect("punct", ";")
        return nets

    def parse_cont_assign(self) -> ContAssign:
        pos = self.expect("kw", "assign").pos
        target = self.parse_lvalue()
        self.expect("punct", "=")
        rhs = self.parse_expr()
        self.expect("punct", ";")
        return ContAssign(target, rhs, pos)

    def parse_process(self) -> Process:
        pos = self.expect("kw", "always").pos
        self.expect("punct", "@")
        trigger = "comb"
        clock: str | None = None
        if self.at("punct", "*"):
            self.next()
        else:
            self.expect("punct", "(")
            if self.at("punct", "*"):
                self.next()
            elif self.at("kw", "posedge"):
                self.next()
                trigger = "posedge"
                clock = self.expect("id").text
            else:
                tok = self.peek()
                raise self.error(tok.pos, f"unsupported sensitivity '{tok.text}'"
                                          " (only posedge <clk> or *)")
            self.expect("punct", ")")
        body = self.parse_stmt_as_block()
        return Process(trigger, clock, body, pos)

    def parse_stmt_as_block(self) -> Block:
        stmt = self.parse_stmt()
        if isinstance(stmt, Block):
            return stmt
        return Block(stmt.pos, [stmt], braced=False)

    def parse_stmt(self) -> Stmt:
        tok = self.peek()
        if self.at("kw", "begin"):
            pos = self.next().pos
            stmts: list[Stmt] = []
            while not self.at("kw", "end"):
                if self.peek().kind == "eof":
                    raise self.error(self.peek().pos,
                                     "unexpected end of input, expected 'end'")
                stmts.append(self.parse_stmt())
            self.next()
            return Block(pos, stmts, braced=True)
        if self.at("kw", "if"):
            pos = self.next().pos
            self.expect("punct", "(")
            cond = self.parse_expr()
            self.expect("punct", ")")
            then = self.parse_stmt_as_block()
            other = None
            if self.at("kw", "else"):
                self.next()
                other = self.parse_stmt_as_block()
            # Normalize: an explicit empty else arm means the same thing as no
            # else arm, and keeping one canonical form makes instrumentation
            # stripping an exact inverse.
            if other is not None and not other.stmts:
                other = None
            return If(pos, cond=cond, then=then, other=other)
        if self.at("kw", "case"):
            return self.parse_case()
        if tok.kind == "sysid":
            return self.parse_display()
        if tok.kind == "id":
            return self.parse_assign_stmt()
        if tok.kind == "eof":
            raise self.error(tok.pos, "unexpected end of input in statement")
        raise self.error(tok.pos, f"unexpected '{tok.text}' in statement")

    def parse_case(self) -> Case:
        pos = self.expect("kw", "case").pos
        self.expect("punct", "(")
        subject = self.parse_expr()
        self.expect("punct", ")")
        items: list[CaseItem] = []
        default: Block | None = None
        default_pos: SourcePos | None = None
        while not self.at("kw", "endcase"):
            tok = self.peek()
            if tok.kind == "eof":
                raise self.error(tok.pos, "unexpected end of input, expected 'endcase'")
            if self.at("kw", "default"):
                dp = self.next().pos
                if default is not None:
                    raise self.error(dp, "duplicate default arm")
                self.expect("punct", ":")
                default = self.parse_stmt_as_block()
                default_pos = dp
            elif tok.kind == "num":
                label_tok = self.next()
                if not label_tok.sized:
                    label = Literal(label_tok.pos, UNSIZED_WIDTH,
                                    value=label_tok.value, base="d", sized=False)
                else:
                    label = Literal(label_tok.pos, label_tok.width,
                                    value=label_tok.value, base=label_tok.base)
                self.expect("punct", ":")
                body = self.parse_stmt_as_block()
                items.append(CaseItem(label, body, label_tok.pos))
            else:
                raise self.error(tok.pos,
                                 f"case item label must be a literal, found '{tok.text}'")
        self.next()
        if not items and default is None:
            raise self.error(pos, "case statement with no arms")
        if default is not None and not default.stmts:
            default = None  # same normalization as empty else arms
            default_pos = None
        if not items:
            raise self.error(pos, "unsupported: case with only a default arm")
        return Case(pos, subject=subject, items=items, default=default,
                    default_pos=default_pos)

    def parse_display(self) -> Display:
        tok = self.next()
        if tok.text != "$display":
            raise self.error(tok.pos, f"unsupported: system call {tok.text}")
        self.expect("punct", "(")
        text = self.expect("str", what="format string").text
        args: list[Expr] = []
        while self.at("punct", ","):
            self.next()
            args.append(self.parse_expr())
        self.expect("punct", ")")
        self.expect("punct", ";")
        return Display(tok.pos, text=text, args=args)

    def parse_assign_stmt(self) -> Stmt:
        target = self.parse_lvalue()
        tok = self.peek()
        if self.at("punct", "<="):
            self.next()
            rhs = self.parse_expr()
            self.expect("punct", ";")
            return NonBlockingAssign(target.pos, target=target, rhs=rhs)
        if self.at("punct", "="):
            self.next()
            rhs = self.parse_expr()
            self.expect("punct", ";")
            return BlockingAssign(target.pos, target=target, rhs=rhs)
        raise self.error(tok.pos, f"expected '=' or '<=', found '{tok.text}'")

    def parse_lvalue(self) -> Expr:
        tok = self.expect("id")
        base = Ident(tok.pos, name=tok.text)
        if self.at("punct", "["):
            return self.parse_select(base)
        return base

    def parse_select(self, base: Ident) -> Expr:
        open_tok = self.expect("punct", "[")
        first = self.parse_expr()
        if self.at("punct", ":"):
            self.next()
            if not isinstance(first, Literal):
                raise self.error(open_tok.pos, "part-select bounds must be literals")
            msb = first.value
            lsb_tok = self.expect("num")
            self.expect("punct", "]")
            return PartSelect(open_tok.pos, base=base, msb=msb, lsb=lsb_tok.value)
        self.expect("punct", "]")
        return BitSelect(open_tok.pos, base=base, index=first)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_binary(0)
        if self.at("punct", "?"):
            pos = self.next().pos
            then = self.parse_ternary()
            self.expect("punct", ":")
            other = self.parse_ternary()
            return Ternary(pos, cond=cond, then=then, other=other)
        return cond

    def parse_binary(self, tier: int) -> Expr:
        if tier >= len(_PRECEDENCE):
            return self.parse_unary()
        lhs = self.parse_binary(tier + 1)
        ops = _PRECEDENCE[tier]
        while self.peek().kind == "punct" and self.peek().text in ops:
            op = self.next()
            rhs = self.parse_binary(tier + 1)
            lhs = Binary(op.pos, op=op.text, lhs=lhs, rhs=rhs)
        return lhs

    def parse_unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "punct" and tok.text in ("~", "!", "-"):
            self.next()
            operand = self.parse_unary()
            return Unary(tok.pos, op=tok.text, operand=operand)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            if tok.sized:
                return Literal(tok.pos, tok.width, value=tok.value, base=tok.base)
            return Literal(tok.pos, UNSIZED_WIDTH, value=tok.value, base="d",
                           sized=False)
        if tok.kind == "id":
            self.next()
            base = Ident(tok.pos, name=tok.text)
            if self.at("punct", "["):
                return self.parse_select(base)
            return base
        if self.at("punct", "("):
            self.next()
            inner = self.parse_expr()
            self.expect("punct", ")")
            return inner
        if self.at("punct", "{"):
            pos = self.next().pos
            parts = [self.parse_expr()]
            while self.at("punct", ","):
                self.next()
                parts.append(self.parse_expr())
            self.expect("punct", "}")
            return Concat(pos, parts=parts)
        if tok.kind == "eof":
            raise self.error(tok.pos, "unexpected end of input in expression")
        raise self.error(tok.pos, f"unexpected '{tok.text}' in expression")


# ---------------------------------------------------------------------------
# Resolver: identifier resolution, width inference, structural checks.


class _Resolver:
    def __init__(self, module: AstModule):
        self.module = module
        self.diags: list[Diagnostic] = []
        self.clock: str | None = None

    def fail(self, pos: SourcePos, message: str) -> None:
        self.diags.append(Diagnostic(pos, message))

    def run(self) -> list[Diagnostic]:
        m = self.module
        seen: dict[str, str] = {}
        for p in m.ports:
            if p.name in seen:
                self.fail(SourcePos(1, 1), f"duplicate declaration of '{p.name}'")
            seen[p.name] = "port"
        for n in m.nets:
            if n.name in seen:
                self.fail(SourcePos(1, 1), f"duplicate declaration of '{n.name}'")
            seen[n.name] = "net"

        clocks = {p.clock for p in m.processes if p.trigger == "posedge"}
        if len(clocks) > 1:
            self.fail(m.processes[0].pos,
                      f"multiple clocks in posedge triggers: {sorted(clocks)}")
        elif clocks:
            self.clock = next(iter(clocks))
            cp = next((p for p in m.ports if p.name == self.clock), None)
            if cp is None or cp.direction != "input" or cp.width != 1:
                self.fail(m.processes[0].pos,
                          f"clock '{self.clock}' must be a 1-bit input port")

        drivers: dict[str, object] = {}
        for idx, proc in enumerate(m.processes):
            self.check_stmt(proc.body, proc, idx, drivers)
        for ca in m.continuous_assigns:
            self.check_target(ca.target, clocked=False, continuous=True,
                              owner=("assign", ca.pos), drivers=drivers)
            self.resolve(ca.rhs)
            self.check_assign_widths(ca.target, ca.rhs, ca.pos)
        return self.diags

    def check_stmt(self, stmt: Stmt, proc: Process, proc_idx: int,
                   drivers: dict) -> None:
        if isinstance(stmt, Block):
            for s in stmt.stmts:
                self.check_stmt(s, proc, proc_idx, drivers)
        elif isinstance(stmt, (BlockingAssign, NonBlockingAssign)):
            if isinstance(stmt, NonBlockingAssign) and proc.trigger != "posedge":
                self.fail(stmt.pos,
                          "non-blocking assign outside a clocked process")
            self.check_target(stmt.target, clocked=proc.trigger == "posedge",
                              continuous=False, owner=("proc", proc_idx),
                              drivers=drivers)
            self.resolve(stmt.rhs)
            self.check_assign_widths(stmt.target, stmt.rhs, stmt.pos)
        elif isinstance(stmt, If):
            self.resolve(stmt.cond)
            self.check_stmt(stmt.then, proc, proc_idx, drivers)
            if stmt.other is not None:
                self.check_stmt(stmt.other, proc, proc_idx, drivers)
        elif isinstance(stmt, Case):
            self.resolve(stmt.subject)
            for item in stmt.items:
                self.resolve(item.label)
                self.check_stmt(item.body, proc, proc_idx, drivers)
            if stmt.default is not None:
                self.check_stmt(stmt.default, proc, proc_idx, drivers)
        elif isinstance(stmt, Display):
            for arg in stmt.args:
                self.resolve(arg)

    def check_target(self, target: Expr, clocked: bool, continuous: bool,
                     owner, drivers: dict) -> None:
        base = target
        if isinstance(target, (BitSelect, PartSelect)):
            base = target.base
            if isinstance(target, BitSelect):
                self.resolve(target.index)
        if not isinstance(base, Ident):
            self.fail(target.pos, "assignment target must be a net")
            return
        self.resolve(base)
        name = base.name
        m = self.module
        port = next((p for p in m.ports if p.name == name), None)
        if port is not None and port.direction == "input":
            self.fail(target.pos, f"cannot assign to input port '{name}'")
            return
        if name == self.clock:
            self.fail(target.pos, f"cannot assign to clock '{name}'")
            return
        is_reg = m.is_reg(name)
        if continuous and is_reg:
            self.fail(target.pos, f"continuous assign target '{name}' must be a wire")
        if not continuous and not is_reg:
            self.fail(target.pos, f"procedural assign target '{name}' must be a reg")
        if m.width_of(name) is None:
            return  # undeclared, already reported by resolve()
        prev = drivers.get(name)
        if prev is not None and prev != owner:
            self.fail(target.pos, f"multi-driver net '{name}'")
        drivers[name] = owner
        if isinstance(target, PartSelect):
            self.check_part_bounds(target, m.width_of(name))
        # target width bookkeeping for printers
        self.resolve(target)

    def check_part_bounds(self, sel: PartSelect, declared: int | None) -> None:
        if sel.msb < sel.lsb:
            self.fail(sel.pos, f"part-select [{sel.msb}:{sel.lsb}] reversed")
        elif declared is not None and sel.msb >= declared:
            self.fail(sel.pos, f"part-select [{sel.msb}:{sel.lsb}] exceeds"
                               f" width {declared}")

    def check_assign_widths(self, target: Expr, rhs: Expr, pos: SourcePos) -> None:
        # Verilog-style silent truncation/extension; nothing to diagnose here.
        # Runtime value checks live in the simulator (input vectors vs ports).
        _ = (target, rhs, pos)

    def resolve(self, expr: Expr | None) -> int:
        """Resolve identifiers and return the node's inferred width."""
        if expr is None:
            return 0
        if isinstance(expr, Ident):
            if expr.name == self.clock:
                self.fail(expr.pos,
                          f"clock '{expr.name}' may only appear in posedge triggers")
            width = self.module.width_of(expr.name)
            if width is None:
                self.fail(expr.pos, f"undeclared identifier '{expr.name}'")
                width = 1
            expr.width = width
            return width
        if isinstance(expr, Literal):
            if not expr.sized:
                expr.width = UNSIZED_WIDTH
            return expr.width
        if isinstance(expr, Unary):
            w = self.resolve(expr.operand)
            expr.width = 1 if expr.op == "!" else w
            return expr.width
        if isinstance(expr, Binary):
            wl = self.resolve(expr.lhs)
            wr = self.resolve(expr.rhs)
            if expr.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
                expr.width = 1
            elif expr.op in ("<<", ">>"):
                expr.width = wl
            else:
                expr.width = max(wl, wr)
            return expr.width
        if isinstance(expr, Ternary):
            self.resolve(expr.cond)
            wt = self.resolve(expr.then)
            we = self.resolve(expr.other)
            expr.width = max(wt, we)
            return expr.width
        if isinstance(expr, BitSelect):
            self.resolve(expr.base)
            self.resolve(expr.index)
            expr.width = 1
            return 1
        if isinstance(expr, PartSelect):
            declared = self.module.width_of(expr.base.name) if expr.base else None
            self.resolve(expr.base)
            self.check_part_bounds(expr, declared)
            expr.width = max(expr.msb - expr.lsb + 1, 1)
            return expr.width
        if isinstance(expr, Concat):
            total = sum(self.resolve(p) for p in expr.parts)
            if total > MAX_WIDTH:
                self.fail(expr.pos,
                          f"unsupported: expression wider than {MAX_WIDTH} bits")
                total = MAX_WIDTH
            expr.width = total
            return total
        raise TypeError(f"unknown expression node {expr!r}")


def parse_module(source: str) -> AstModule:
    """Parse a single module; raises :class:`ParseError` with diagnostics."""
    module = _Parser(source).parse_module()
    diags = _Resolver(module).run()
    if diags:
        raise ParseError(diags)
    return module


def try_parse(source: str) -> tuple[AstModule | None, list[Diagnostic]]:
    try:
        return parse_module(source), []
    except ParseError as exc:
        return None, exc.diagnostics
