#!/usr/bin/env python3
"""Walk the whole pipeline on the bundled counter design.

Prints the seed trace, the symbolic path condition, the first branch
mutation with its constraint set and solved inputs, and the final
coverage report of the exploration loop.
"""

from pathlib import Path

from veriloop import InputVector, instrument, parse_module, run
from veriloop.cfg import BranchId
from veriloop.concolic import explore
from veriloop.solver import emit_smtlib, solve
from veriloop.symbolic import mutate_branch, symbolic_replay

CORPUS = Path(__file__).resolve().parents[1] / "tests" / "corpus"


def main() -> None:
    design = instrument(parse_module((CORPUS / "counter_buggy.v").read_text()))
    seed = InputVector(({"reset": 1, "in": 0x00},
                        {"reset": 0, "in": 0x00},
                        {"reset": 0, "in": 0x00}))

    trace = run(design, seed)
    print("== seed trace ==")
    for record in trace.records:
        branches = ", ".join(str(b) for b in record.branches)
        regs = " ".join(f"{k}=0x{v:x}" for k, v in record.registers.items())
        print(f"  cycle {record.cycle}: [{branches}]  {regs}")

    replay = symbolic_replay(design, trace, seed)
    print("\n== path condition ==")
    for constraint in replay.path.constraints:
        print(f"  [{constraint.provenance:28s}] {constraint.render()}")

    print("\n== mutate cycle-1 B_2 -> B_3 ==")
    constraints = mutate_branch(replay, 1, BranchId(3))
    for constraint in constraints.constraints:
        print(f"  {constraint.render()}")
    result = solve(constraints)
    print(f"  solver: {result.status}  {result.assignment}")
    print("\n== SMT-LIB export ==")
    print(emit_smtlib(constraints))

    print("== exploration ==")
    explored = explore(design, [seed])
    for event, pct in explored.stats.history:
        print(f"  {pct:6.2f}%  {event}")
    print(f"\nfull input set ({len(explored.input_set)} vectors):")
    for entry in explored.input_set.entries:
        print(f"  {entry.provenance.render():20s} {entry.vector.to_json()}")
    print(f"\ncoverage: {explored.coverage.to_json_dict()}")


if __name__ == "__main__":
    main()
