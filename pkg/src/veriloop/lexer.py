"""Hand-rolled tokenizer for the Verilog subset.

Produces a flat token list; ``//`` and ``/* */`` comments are skipped.
Sized literals (``8'hFF``) become single NUMBER tokens carrying width,
value, and base.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .diagnostics import Diagnostic, ParseError
from .vast import MAX_WIDTH, SourcePos

KEYWORDS = {
    "module", "endmodule", "input", "output", "wire", "reg",
    "always", "posedge", "begin", "end", "if", "else",
    "case", "endcase", "default", "assign",
}

UNSUPPORTED_KEYWORDS = {
    "generate", "endgenerate", "function", "endfunction", "task", "endtask",
    "initial", "inout", "negedge", "integer", "parameter", "localparam",
    "for", "while", "repeat", "forever", "genvar", "casex", "casez",
}

# Longest match first.
PUNCT = [
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "(", ")", "[", "]", "{", "}",
    "+", "-", "&", "|", "^", "~", "!", "<", ">",
    "=", "?", ":", ";", ",", "@", "*", ".",
]

_SIZED_RE = re.compile(r"(\d+)\s*'\s*([bdhBDH])\s*([0-9a-fA-F_xXzZ?]+)")
_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_$]*")
_NUM_RE = re.compile(r"\d[\d_]*")
_STRING_RE = re.compile(r'"((?:[^"\\]|\\.)*)"')


@dataclass(frozen=True)
class Token:
    kind: str   # "kw" | "id" | "num" | "str" | "punct" | "sysid" | "eof"
    text: str
    pos: SourcePos
    # number payload
    value: int = 0
    width: int = 0
    sized: bool = False
    base: str = "d"


def _err(pos: SourcePos, message: str) -> ParseError:
    return ParseError([Diagnostic(pos, message)])


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def pos() -> SourcePos:
        return SourcePos(line, col)

    def advance(text: str) -> None:
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(ch)
            i += 1
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            end = n if end < 0 else end
            advance(source[i:end])
            i = end
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i)
            if end < 0:
                raise _err(pos(), "unterminated block comment")
            advance(source[i:end + 2])
            i = end + 2
            continue
        if ch == "`":
            raise _err(pos(), "unsupported: preprocessor directive")

        m = _SIZED_RE.match(source, i)
        if m:
            p = pos()
            width = int(m.group(1))
            base = m.group(2).lower()
            digits = m.group(3).replace("_", "")
            if any(c in "xXzZ?" for c in digits):
                raise _err(p, "unsupported: x/z literal value")
            if width < 1 or width > MAX_WIDTH:
                raise _err(p, f"literal width {width} outside 1..{MAX_WIDTH}")
            try:
                radix = {"b": 2, "d": 10, "h": 16}[base]
                value = int(digits, radix)
            except ValueError:
                raise _err(p, f"bad digits for base '{base}' literal") from None
            if value >= 1 << width:
                raise _err(p, f"literal value does not fit in {width} bits")
            tokens.append(Token("num", m.group(0), p, value=value, width=width,
                                sized=True, base=base))
            advance(m.group(0))
            i = m.end()
            continue

        m = _NUM_RE.match(source, i)
        if m:
            p = pos()
            value = int(m.group(0).replace("_", ""))
            tokens.append(Token("num", m.group(0), p, value=value, width=0,
                                sized=False, base="d"))
            advance(m.group(0))
            i = m.end()
            continue

        if ch == "$":
            m = _IDENT_RE.match(source, i + 1)
            if not m:
                raise _err(pos(), "bad system identifier")
            p = pos()
            text = "$" + m.group(0)
            tokens.append(Token("sysid", text, p))
            advance(text)
            i = i + 1 + m.end() - m.start()
            continue

        m = _IDENT_RE.match(source, i)
        if m:
            p = pos()
            text = m.group(0)
            if text in UNSUPPORTED_KEYWORDS:
                raise _err(p, f"unsupported: {text}")
            kind = "kw" if text in KEYWORDS else "id"
            tokens.append(Token(kind, text, p))
            advance(text)
            i = m.end()
            continue

        if ch == '"':
            m = _STRING_RE.match(source, i)
            if not m:
                raise _err(pos(), "unterminated string")
            p = pos()
            tokens.append(Token("str", m.group(1), p))
            advance(m.group(0))
            i = m.end()
            continue

        for p_text in PUNCT:
            if source.startswith(p_text, i):
                tokens.append(Token("punct", p_text, pos()))
                advance(p_text)
                i += len(p_text)
                break
        else:
            raise _err(pos(), f"unexpected character {ch!r}")

    tokens.append(Token("eof", "", pos()))
    return tokens
