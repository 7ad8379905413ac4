"""One config file (TOML or JSON) with a section per subsystem.

Example::

    [solver]
    max_evaluations = 1000000
    wall_ms = 2000

    [explore]
    max_solver_calls = 500
    max_sim_runs = 2000
    coverage_target_pct = 100.0

    [oracle]
    command = ["python", "-m", "veriloop.stub_oracle", "counter"]

    [loop]
    max_syntax_iterations = 5
    max_functional_iterations = 5
    max_redundancy_iterations = 3
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .concolic import ExploreBudget
from .oracle import ModelSpec
from .solver import SolveBudget

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def load_config(path: str | Path | None) -> dict:
    if path is None:
        return {}
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return json.loads(text)
    return tomllib.loads(text)


def solve_budget_from(config: dict) -> SolveBudget:
    section = config.get("solver", {})
    return SolveBudget(
        max_evaluations=int(section.get("max_evaluations", 1_000_000)),
        wall_ms=int(section.get("wall_ms", 2_000)),
    )


def explore_budget_from(config: dict) -> ExploreBudget:
    section = config.get("explore", {})
    return ExploreBudget(
        max_solver_calls=int(section.get("max_solver_calls", 500)),
        max_sim_runs=int(section.get("max_sim_runs", 2000)),
        solve_budget=solve_budget_from(config),
        coverage_target_pct=float(section.get("coverage_target_pct", 100.0)),
    )


def model_spec_from(config: dict) -> ModelSpec | None:
    section = config.get("oracle")
    if not section or "command" not in section:
        return None
    return ModelSpec.from_config(section)


def loop_section(config: dict) -> dict:
    return config.get("loop", {})
