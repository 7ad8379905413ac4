"""Diagnostics shared by the frontend and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .vast import SourcePos


@dataclass(frozen=True)
class Diagnostic:
    pos: SourcePos
    message: str
    severity: str = "error"

    def render(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.pos.line}:{self.pos.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised when a source buffer cannot be parsed; carries all diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics))


class VeriloopError(Exception):
    """Base for tool-level errors outside parsing (simulation, protocol, ...)."""
