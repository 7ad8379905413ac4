"""Differential checking against an external golden-model process.

The wire protocol is line-delimited JSON over the model's standard
streams, one fresh process per input vector:

    -> {"type":"init","ports":{"inputs":{"reset":1,"in":8},"outputs":{"out":1}}}
    <- {"type":"ok"}
    -> {"type":"cycle","n":0,"inputs":{"reset":"0x1","in":"0x00"}}
    <- {"type":"out","n":0,"outputs":{"out":"0x0"},"tags":["S_0"]}
    ...
    -> {"type":"end"}            (no response; the process exits 0)

Values are hex strings.  ``tags`` is optional and carries opaque
reference-side coverage labels.  Comparison is on output ports only;
register snapshots are diagnostic context for the debug prompts, not part
of the verdict.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .diagnostics import VeriloopError
from .instrument import InstrumentedDesign
from .simulator import InputVector, Trace, format_value, parse_value, run
from .vast import AstModule


class OracleError(VeriloopError):
    def __init__(self, message: str, cycle: int | None = None,
                 vector_index: int | None = None):
        self.message = message
        self.cycle = cycle
        self.vector_index = vector_index
        where = ""
        if vector_index is not None:
            where += f" [vector {vector_index}]"
        if cycle is not None:
            where += f" [cycle {cycle}]"
        super().__init__(message + where)


@dataclass(frozen=True)
class ModelSpec:
    command: tuple[str, ...]
    cwd: str | None = None
    timeout_s: float = 10.0

    @classmethod
    def from_config(cls, data: dict) -> "ModelSpec":
        command = data["command"]
        if isinstance(command, str):
            command = tuple(command.split())
        return cls(tuple(command), data.get("cwd"),
                   float(data.get("timeout_s", 10.0)))


@dataclass(frozen=True)
class RefTrace:
    outputs: tuple[dict, ...]
    tags: tuple[tuple[str, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.outputs)


@dataclass(frozen=True)
class MismatchReport:
    vector: InputVector
    first_divergent_cycle: int
    diffs: dict           # output name -> (expected, observed)
    dut_trace: Trace
    ref_trace: RefTrace
    vector_index: int = 0

    def summary(self) -> str:
        parts = ", ".join(
            f"Expected {name}={format_value(exp)}, Got {name}={format_value(obs)}"
            for name, (exp, obs) in sorted(self.diffs.items()))
        return f"cycle {self.first_divergent_cycle}: {parts}"

    def to_json_dict(self) -> dict:
        return {
            "vector_index": self.vector_index,
            "first_divergent_cycle": self.first_divergent_cycle,
            "diffs": {k: {"expected": format_value(e),
                          "observed": format_value(o)}
                      for k, (e, o) in self.diffs.items()},
            "vector": self.vector.to_json(),
            "dut_trace": [json.loads(r.to_json_line())
                          for r in self.dut_trace.records],
            "ref_outputs": [{k: format_value(v) for k, v in row.items()}
                            for row in self.ref_trace.outputs],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MismatchReport":
        dut = Trace.from_json_lines(
            "\n".join(json.dumps(r) for r in data["dut_trace"]))
        ref = RefTrace(tuple({k: parse_value(v) for k, v in row.items()}
                             for row in data["ref_outputs"]))
        diffs = {k: (parse_value(d["expected"]), parse_value(d["observed"]))
                 for k, d in data["diffs"].items()}
        return cls(InputVector.from_json(data["vector"]),
                   data["first_divergent_cycle"], diffs, dut, ref,
                   data.get("vector_index", 0))


@dataclass(frozen=True)
class Verdict:
    passed: bool
    mismatches: tuple[MismatchReport, ...] = ()
    warnings: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


class _LineProcess:
    """A coprocess with timeout-guarded line reads."""

    def __init__(self, spec: ModelSpec):
        try:
            self.proc = subprocess.Popen(
                list(spec.command), cwd=spec.cwd, text=True,
                stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.PIPE)
        except OSError as exc:
            raise OracleError(f"cannot launch model {spec.command}: {exc}")
        self.timeout = spec.timeout_s
        self.lineno = 0
        self.queue: queue.Queue = queue.Queue()
        self.reader = threading.Thread(target=self._pump, daemon=True)
        self.reader.start()

    def _pump(self) -> None:
        for line in self.proc.stdout:
            self.queue.put(line)
        self.queue.put(None)

    def send(self, obj: dict) -> None:
        try:
            self.proc.stdin.write(json.dumps(obj) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError):
            raise OracleError("model process closed its input prematurely")

    def recv(self) -> tuple[int, dict]:
        try:
            line = self.queue.get(timeout=self.timeout)
        except queue.Empty:
            raise OracleError(f"model response timed out after {self.timeout}s")
        if line is None:
            raise OracleError("model exited before responding")
        self.lineno += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            raise OracleError(
                f"protocol violation at response line {self.lineno}:"
                f" not JSON: {line.strip()!r}")
        if not isinstance(obj, dict):
            raise OracleError(
                f"protocol violation at response line {self.lineno}:"
                " expected an object")
        return self.lineno, obj

    def finish(self) -> None:
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=self.timeout)
        except subprocess.TimeoutExpired:
            self.proc.kill()

    def kill(self) -> None:
        if self.proc.poll() is None:
            self.proc.kill()


def _port_widths(module: AstModule) -> tuple[dict, dict]:
    inputs = {p.name: p.width for p in module.data_input_ports()}
    outputs = {p.name: p.width for p in module.output_ports()}
    return inputs, outputs


def run_reference(model: ModelSpec, module: AstModule,
                  inputs: InputVector) -> RefTrace:
    """Drive one fresh model process through the whole vector."""
    in_ports, out_ports = _port_widths(module)
    proc = _LineProcess(model)
    try:
        proc.send({"type": "init",
                   "ports": {"inputs": in_ports, "outputs": out_ports}})
        lineno, reply = proc.recv()
        if reply.get("type") == "error":
            raise OracleError(f"model error: {reply.get('message', '')}")
        if reply.get("type") != "ok":
            raise OracleError(
                f"protocol violation at response line {lineno}:"
                f" expected init ok, got {reply.get('type')!r}")
        outputs = []
        tags = []
        for n, cycle in enumerate(inputs.cycles):
            try:
                proc.send({"type": "cycle", "n": n,
                           "inputs": {k: format_value(v)
                                      for k, v in cycle.items()}})
                lineno, reply = proc.recv()
            except OracleError as exc:
                if exc.cycle is None:
                    raise OracleError(exc.message, cycle=n) from None
                raise
            if reply.get("type") == "error":
                raise OracleError(f"model error: {reply.get('message', '')}",
                                  cycle=n)
            if reply.get("type") != "out":
                raise OracleError(
                    f"protocol violation at response line {lineno}:"
                    f" expected type 'out', got {reply.get('type')!r}", cycle=n)
            if reply.get("n") != n:
                raise OracleError(
                    f"protocol violation at response line {lineno}: response"
                    f" n={reply.get('n')!r} does not match request n={n}",
                    cycle=n)
            outs = reply.get("outputs")
            if not isinstance(outs, dict):
                raise OracleError(
                    f"protocol violation at response line {lineno}:"
                    " missing output field", cycle=n)
            row = {}
            for name, width in out_ports.items():
                if name not in outs:
                    raise OracleError(
                        f"protocol violation at response line {lineno}:"
                        f" missing output field '{name}'", cycle=n)
                row[name] = parse_value(outs[name])
            outputs.append(row)
            tags.append(tuple(reply.get("tags", ())))
        proc.send({"type": "end"})
        proc.finish()
        return RefTrace(tuple(outputs), tuple(tags))
    except OracleError:
        proc.kill()
        raise


def check_vector(design: InstrumentedDesign, model: ModelSpec,
                 vector: InputVector, vector_index: int = 0,
                 ) -> MismatchReport | None:
    """Compare DUT and reference outputs cycle by cycle; None means match."""
    dut = run(design, vector)
    try:
        ref = run_reference(model, design.module, vector)
    except OracleError as exc:
        raise OracleError(exc.message, cycle=exc.cycle,
                          vector_index=vector_index) from None
    for n, record in enumerate(dut.records):
        diffs = {name: (ref.outputs[n][name], observed)
                 for name, observed in record.outputs.items()
                 if ref.outputs[n][name] != observed}
        if diffs:
            return MismatchReport(vector, n, diffs, dut, ref, vector_index)
    return None


def differential_check(design: InstrumentedDesign, model: ModelSpec,
                       inputs, jobs: int = 1) -> Verdict:
    """Pass only when every vector matches the reference on every cycle."""
    vectors = _as_vectors(inputs)
    if not vectors:
        return Verdict(True, warnings=("empty input set: vacuous pass",))
    if jobs <= 1:
        reports = [check_vector(design, model, v, i)
                   for i, v in enumerate(vectors)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(
                lambda iv: check_vector(design, model, iv[1], iv[0]),
                enumerate(vectors)))
    mismatches = tuple(r for r in reports if r is not None)
    return Verdict(not mismatches, mismatches)


def _as_vectors(inputs) -> list[InputVector]:
    if isinstance(inputs, InputVector):
        return [inputs]
    if hasattr(inputs, "vectors"):
        return inputs.vectors()
    return list(inputs)


def reference_tags(model: ModelSpec, module: AstModule,
                   inputs: InputVector) -> list[tuple[str, ...]]:
    """Reference-side coverage tags for one vector (may be all-empty)."""
    ref = run_reference(model, module, inputs)
    return list(ref.tags)
