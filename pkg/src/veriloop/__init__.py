"""veriloop: concolic coverage, differential checking, and a closed repair
loop for a small synthesizable Verilog subset."""

from .cfg import BranchId, BranchMap, Cfg, build_cfg
from .diagnostics import Diagnostic, ParseError, VeriloopError
from .instrument import (
    InstrumentedDesign,
    InstrumentError,
    instrument,
    strip_instrumentation,
)
from .interface import PortSpec, validate_interface
from .parser import parse_module, try_parse
from .printer import pretty_print
from .simulator import (
    CycleRecord,
    InputVector,
    SimulationError,
    Trace,
    run,
    run_module,
)
from .vast import AstModule, SourcePos, ast_equal

__version__ = "0.1.0"

__all__ = [
    "AstModule", "BranchId", "BranchMap", "Cfg", "CycleRecord", "Diagnostic",
    "InputVector", "InstrumentError", "InstrumentedDesign", "ParseError",
    "PortSpec", "SimulationError", "SourcePos", "Trace", "VeriloopError",
    "ast_equal", "build_cfg", "instrument", "parse_module", "pretty_print",
    "run", "run_module", "strip_instrumentation", "try_parse",
    "validate_interface",
]
