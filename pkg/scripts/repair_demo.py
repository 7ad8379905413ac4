#!/usr/bin/env python3
"""Closed repair loop demo with a scripted completion client.

Seeds a syntax defect into the buggy counter, lets the loop repair the
syntax, then the timing bug, then prune; prints the iteration log and
every prompt artifact the loop produced.
"""

import sys
from pathlib import Path

from veriloop import PortSpec
from veriloop.concolic import InputSet
from veriloop.loop import LoopConfig, MockClient, run_loop
from veriloop.oracle import ModelSpec
from veriloop.simulator import InputVector

ROOT = Path(__file__).resolve().parents[1]
CORPUS = ROOT / "tests" / "corpus"
STUB = ROOT / "src" / "veriloop" / "stub_oracle.py"


def main() -> None:
    buggy = (CORPUS / "counter_buggy.v").read_text()
    fixed = (CORPUS / "counter_fixed.v").read_text()
    broken = buggy.replace("counter <= 8'h00;", "counter <= 8'h00", 1)

    seed = InputVector(({"reset": 1, "in": 0}, {"reset": 0, "in": 0},
                        {"reset": 0, "in": 0}))
    config = LoopConfig(
        oracle=ModelSpec((sys.executable, str(STUB), "counter")),
        port_spec=PortSpec((("clock", "input", 1), ("reset", "input", 1),
                            ("in", "input", 8), ("out", "output", 1))),
        seeds=InputSet.of_vectors([seed]),
        jobs=4,
    )
    client = MockClient([buggy, fixed])
    outcome = run_loop(broken, config, client)

    print(f"status: {outcome.status}\n")
    print("== iteration log ==")
    for step in outcome.log:
        pct = "" if step.coverage_pct is None else f"  cov={step.coverage_pct:.1f}%"
        print(f"  [{step.phase:10s}] {step.prompt_kind or '-':13s}"
              f" {step.detail}{pct}")
    print("\n== prompt artifacts ==")
    for artifact in outcome.artifacts:
        header = artifact.text.splitlines()[0]
        print(f"  {artifact.kind:13s} {header[:70]}")
    print("\n== final RTL ==")
    print(outcome.final_rtl)


if __name__ == "__main__":
    main()
