"""Command-line interface.

Subcommands: parse, instrument, simulate, concolic, diff, prompt, metrics,
loop.  Machine-readable results go to files, human summaries to stdout.
Exit codes: 0 success or Pass, 1 Fail verdicts, 2 tool/usage errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .cfg import build_cfg
from .concolic import InputSet, default_seed, explore
from .config import (
    explore_budget_from,
    load_config,
    loop_section,
    model_spec_from,
)
from .diagnostics import ParseError, VeriloopError
from .instrument import instrument, is_instrumented, strip_instrumentation
from .interface import PortSpec, validate_interface
from .loop import CommandClient, HttpClient, LoopConfig, MockClient, run_loop
from .oracle import MismatchReport, ModelSpec, differential_check
from .parser import parse_module
from .reporting import (
    FprInput,
    MetricError,
    build_redundancy_prompt,
    build_syntax_debug_prompt,
    build_trace_debug_prompt,
    metrics_summary,
)
from .simulator import InputVector, run


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None


def _load_design(path: str):
    """Parse an RTL file; re-canonicalize instrumentation when present."""
    from .vast import ast_equal

    module = parse_module(_read(path))
    if is_instrumented(module):
        clean = strip_instrumentation(module)
        design = instrument(clean)
        if not ast_equal(design.module, module):
            raise CliError(
                f"{path}: existing instrumentation does not match canonical"
                " branch numbering; strip it first")
        return design
    return instrument(module)


def _load_inputs(path: str) -> InputSet:
    return InputSet.load(path)


def _write_json(path: str | Path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_parse(args) -> int:
    try:
        module = parse_module(_read(args.file))
    except ParseError as exc:
        for diag in exc.diagnostics:
            print(diag.render(args.file))
        return 1
    message = f"{args.file}: ok: module '{module.name}'"
    if args.ports:
        mismatches = validate_interface(module, PortSpec.from_json(args.ports))
        if mismatches:
            for m in mismatches:
                print(f"{args.file}:1:1: error: interface mismatch: {m}")
            return 1
        message += " (interface ok)"
    print(message)
    return 0


def cmd_instrument(args) -> int:
    module = parse_module(_read(args.file))
    design = instrument(module)
    out = Path(args.out or Path(args.file).with_suffix(".instrumented.v"))
    out.write_text(design.source)
    map_path = Path(args.map or out.with_suffix(".branchmap.json"))
    _write_json(map_path, design.branch_map.to_json_dict())
    print(f"{args.file}: {len(design.branch_map)} branches ->"
          f" {out} (map: {map_path})")
    return 0


def cmd_simulate(args) -> int:
    design = _load_design(args.file)
    input_set = _load_inputs(args.inputs)
    out = Path(args.out or Path(args.file).with_suffix(".trace.jsonl"))
    chunks = []
    for i, vector in enumerate(input_set.vectors()):
        trace = run(design, vector)
        chunks.append(trace.to_json_lines())
        if len(input_set) > 1:
            print(f"vector {i}: {len(trace)} cycles,"
                  f" covered {sorted(str(b) for b in trace.covered())}")
    out.write_text("".join(chunks))
    last = chunks[-1].strip().splitlines() if chunks else []
    print(f"{args.file}: {len(input_set)} vector(s) -> {out}")
    if last:
        print(last[0])
    return 0


def cmd_concolic(args) -> int:
    design = _load_design(args.file)
    config = load_config(args.config)
    budget = explore_budget_from(config)
    if args.seed:
        seeds = _load_inputs(args.seed)
    else:
        seeds = InputSet.of_vectors([default_seed(design, args.seed_cycles)])
    result = explore(design, seeds, budget)
    set_out = Path(args.out or Path(args.file).with_suffix(".inputs.json"))
    cov_out = Path(args.coverage or Path(args.file).with_suffix(".coverage.json"))
    result.input_set.save(set_out)
    _write_json(cov_out, result.coverage.to_json_dict())
    print(f"{args.file}: coverage {result.coverage.coverage_pct:.1f}%"
          f" ({result.coverage.covered}/{result.coverage.total} branches),"
          f" {len(result.input_set)} vectors,"
          f" {result.stats.solver_calls} solver calls,"
          f" stop: {result.stats.stop_reason}")
    print(f"inputs: {set_out}\ncoverage: {cov_out}")
    return 0


def cmd_diff(args) -> int:
    design = _load_design(args.file)
    model = ModelSpec(tuple(args.oracle.split()) if isinstance(args.oracle, str)
                      else tuple(args.oracle))
    inputs = _load_inputs(args.inputs)
    verdict = differential_check(design, model, inputs, jobs=args.jobs)
    out = Path(args.out or Path(args.file).with_suffix(".verdict.json"))
    _write_json(out, {
        "passed": verdict.passed,
        "warnings": list(verdict.warnings),
        "mismatches": [m.to_json_dict() for m in verdict.mismatches],
    })
    if verdict.passed:
        print(f"{args.file}: PASS over {len(inputs)} vector(s) -> {out}")
        return 0
    first = verdict.mismatches[0]
    print(f"{args.file}: FAIL ({len(verdict.mismatches)} mismatching"
          f" vector(s)) -> {out}")
    print(f"first mismatch: vector {first.vector_index}, {first.summary()}")
    return 1


def cmd_prompt(args) -> int:
    code = _read(args.code)
    if args.kind == "syntax-debug":
        try:
            parse_module(code)
            diags = []
        except ParseError as exc:
            diags = exc.diagnostics
        artifact = build_syntax_debug_prompt(code, diags, args.code)
    elif args.kind == "trace-debug":
        if not args.report:
            raise CliError("trace-debug needs --report from 'diff'")
        data = json.loads(_read(args.report))
        reports = data.get("mismatches", [data])
        if not reports:
            raise CliError("verdict has no mismatches; nothing to debug")
        artifact = build_trace_debug_prompt(
            code, MismatchReport.from_json_dict(reports[0]))
    else:  # redundancy
        if not args.coverage:
            raise CliError("redundancy needs --coverage from 'concolic'")
        from .cfg import BranchId
        from .concolic import BranchCoverage, CoverageReport
        raw = json.loads(_read(args.coverage))
        pct = raw.pop("coverage_pct", 0.0)
        report = CoverageReport(
            {BranchId.parse(k): BranchCoverage(v["hits"], v["class"])
             for k, v in raw.items()}, pct)
        branch_map = None
        if args.code:
            module = parse_module(code)
            if is_instrumented(module):
                module = strip_instrumentation(module)
            _, branch_map = build_cfg(module)
        artifact = build_redundancy_prompt(code, report, branch_map)
    base = Path(args.out or f"prompt_{args.kind}")
    md, sidecar = artifact.save(base)
    print(f"{artifact.kind}: {md} (+ {sidecar})")
    return 0


def cmd_metrics(args) -> int:
    rows = []
    with open(args.results) as handle:
        for row in csv.DictReader(handle):
            rows.append((row["problem"], int(row["n"]), int(row["c"])))
    if not rows:
        raise CliError(f"{args.results}: no data rows")
    fpr_input = None
    if args.fpr_passed is not None:
        if args.fpr_correct is None:
            raise CliError("--fpr-passed needs --fpr-correct")
        fpr_input = FprInput(args.fpr_passed, args.fpr_correct)
    try:
        summary = metrics_summary(rows, args.k or [1], fpr_input)
    except MetricError as exc:
        raise CliError(str(exc)) from None
    out = Path(args.out or "metrics.json")
    _write_json(out, summary)
    print(json.dumps(summary, indent=2))
    print(f"-> {out}")
    return 0


def _client_from_manifest(manifest: dict, base: Path):
    spec = manifest.get("client", {})
    kind = spec.get("kind", "mock")
    if kind == "mock":
        responses = spec.get("responses")
        if responses is None:
            raise CliError("mock client needs a 'responses' file")
        return MockClient.from_file(base / responses,
                                    repeat_last=spec.get("repeat_last", False))
    if kind == "http":
        return HttpClient(spec["url"], float(spec.get("timeout_s", 60)))
    if kind == "command":
        return CommandClient(spec["command"],
                             float(spec.get("timeout_s", 120)))
    raise CliError(f"unknown client kind {kind!r}")


def cmd_loop(args) -> int:
    manifest_path = Path(args.manifest)
    manifest = load_config(manifest_path)
    base = manifest_path.parent

    def need(key: str) -> Path:
        if key not in manifest:
            raise CliError(f"manifest missing '{key}'")
        path = base / manifest[key]
        if not path.exists():
            raise CliError(f"manifest path does not exist: {path}")
        return path

    rtl = need("rtl").read_text()
    port_spec = (PortSpec.from_json(need("port_spec"))
                 if "port_spec" in manifest else None)
    config = load_config(need("config")) if "config" in manifest else {}
    oracle = model_spec_from(manifest) or model_spec_from(config)
    if oracle is None:
        raise CliError("no oracle command in manifest or config")
    seeds = InputSet.load(need("seeds")) if "seeds" in manifest else None
    section = loop_section(config)
    loop_config = LoopConfig(
        oracle=oracle,
        port_spec=port_spec,
        max_syntax_iterations=int(section.get("max_syntax_iterations", 5)),
        max_functional_iterations=int(
            section.get("max_functional_iterations", 5)),
        max_redundancy_iterations=int(
            section.get("max_redundancy_iterations", 3)),
        explore_budget=explore_budget_from(config),
        seeds=seeds,
        jobs=args.jobs,
    )
    client = _client_from_manifest(manifest, base)
    outcome = run_loop(rtl, loop_config, client)

    out_dir = base / manifest.get("out_dir", "loop_out")
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "final.v").write_text(outcome.final_rtl)
    _write_json(out_dir / "outcome.json", {
        "problem": manifest.get("problem", manifest_path.stem),
        "status": outcome.status,
        "coverage": outcome.coverage.to_json_dict() if outcome.coverage else None,
        "passed": outcome.verdict.passed if outcome.verdict else None,
        "log": [{"phase": s.phase, "prompt": s.prompt_kind,
                 "detail": s.detail, "coverage_pct": s.coverage_pct,
                 "passed": s.passed} for s in outcome.log],
    })
    for i, artifact in enumerate(outcome.artifacts):
        artifact.save(out_dir / f"artifact_{i:02d}_{artifact.kind}")
    if outcome.input_set is not None:
        outcome.input_set.save(out_dir / "full_inputs.json")
    print(f"status: {outcome.status} -> {out_dir}")
    return 0 if outcome.status == "verified" else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veriloop",
        description="Concolic coverage, differential checking, and repair"
                    " loops for a small Verilog subset.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and diagnose a design")
    p.add_argument("file")
    p.add_argument("--ports", help="port-spec JSON to validate against")
    p.set_defaults(fn=cmd_parse)

    p = sub.add_parser("instrument", help="emit instrumented RTL + branch map")
    p.add_argument("file")
    p.add_argument("-o", "--out")
    p.add_argument("--map")
    p.set_defaults(fn=cmd_instrument)

    p = sub.add_parser("simulate", help="run input vectors, write trace JSONL")
    p.add_argument("file")
    p.add_argument("inputs", help="InputVector JSON or input-set JSON")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("concolic", help="explore coverage, emit Full Input set")
    p.add_argument("file")
    p.add_argument("--seed", help="seed vector/set JSON (default: auto reset)")
    p.add_argument("--seed-cycles", type=int, default=8)
    p.add_argument("--config")
    p.add_argument("-o", "--out")
    p.add_argument("--coverage")
    p.set_defaults(fn=cmd_concolic)

    p = sub.add_parser("diff", help="differential check against a golden model")
    p.add_argument("file")
    p.add_argument("inputs")
    p.add_argument("--oracle", required=True,
                   help="golden model command line")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_diff)

    p = sub.add_parser("prompt", help="build feedback prompt artifacts")
    p.add_argument("kind", choices=["syntax-debug", "trace-debug",
                                    "redundancy"])
    p.add_argument("--code", required=True)
    p.add_argument("--report", help="verdict JSON from 'diff'")
    p.add_argument("--coverage", help="coverage JSON from 'concolic'")
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_prompt)

    p = sub.add_parser("metrics", help="pass@k / FPR from a results CSV")
    p.add_argument("results", help="CSV with header problem,n,c")
    p.add_argument("--k", type=int, action="append")
    p.add_argument("--fpr-passed", type=int)
    p.add_argument("--fpr-correct", type=int)
    p.add_argument("-o", "--out")
    p.set_defaults(fn=cmd_metrics)

    p = sub.add_parser("loop", help="full repair loop from a run manifest")
    p.add_argument("manifest")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_loop)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CliError, VeriloopError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
