"""Reference models for the bundled corpus, served over the oracle wire
protocol.  ``python -m veriloop.stub_oracle <model>`` runs one session on
stdin/stdout: init, cycles, end.

Each model is a plain state machine: ``reset()`` then one ``step(inputs)``
per cycle returning the post-edge outputs, matching what the simulator
records for the corresponding corpus design.  A few deliberately broken
models (``chaos``, ``dies``) exist for protocol robustness tests.
"""

from __future__ import annotations

import json
import sys


def _hex(value: int) -> str:
    return f"0x{value:x}"


def _int(text) -> int:
    if isinstance(text, int):
        return text
    s = str(text).lower()
    return int(s, 16) if s.startswith("0x") else int(s)


class CounterModel:
    """Counts up on 0x02, down on 0x00, clears on 0xFF, holds otherwise;
    ``out`` is high exactly when the counter sits at 1."""

    def reset(self):
        self.counter = 0

    def step(self, inputs):
        if _int(inputs["reset"]):
            self.counter = 0
        else:
            value = _int(inputs["in"])
            if value == 0x00:
                self.counter = (self.counter - 1) & 0xFF
            elif value == 0x02:
                self.counter = (self.counter + 1) & 0xFF
            elif value == 0xFF:
                self.counter = 0
        return {"out": int(self.counter == 1)}

    def tags(self):
        return [f"C_{self.counter:02x}"]


class CounterLaggedModel:
    """Counter variant whose output check runs on the pre-update value, so
    ``out`` rises one cycle late.  Useful as a deliberately wrong oracle."""

    def reset(self):
        self.counter = 0
        self.out = 0

    def step(self, inputs):
        if _int(inputs["reset"]):
            self.counter = 0
            self.out = 0
        else:
            self.out = int(self.counter == 1)
            value = _int(inputs["in"])
            if value == 0x00:
                self.counter = (self.counter - 1) & 0xFF
            elif value == 0x02:
                self.counter = (self.counter + 1) & 0xFF
            elif value == 0xFF:
                self.counter = 0
        return {"out": self.out}


class DeadArmModel:
    def reset(self):
        self.y = 0

    def step(self, inputs):
        self.y = 0 if _int(inputs["reset"]) else _int(inputs["x"]) & 0xFF
        return {"y": self.y}


class GuardedModel:
    """Warm-up counter: the data path only opens after four idle cycles."""

    def reset(self):
        self.warm = 0
        self.out = 0

    def step(self, inputs):
        if _int(inputs["reset"]):
            self.warm = 0
            self.out = 0
        elif self.warm < 4:
            self.warm += 1
            self.out = 0
        else:
            self.out = _int(inputs["in"]) & 1
        return {"out": self.out}


class TwoStageModel:
    """Arms on 0xBEEF, then fires while armed and fed 0x1234."""

    def reset(self):
        self.armed = 0
        self.out = 0

    def step(self, inputs):
        if _int(inputs["reset"]):
            self.armed = 0
            self.out = 0
            return {"out": 0}
        value = _int(inputs["in"])
        self.out = int(self.armed and value == 0x1234)
        if value == 0xBEEF:
            self.armed = 1
        return {"out": self.out}


class FsmSeqModel:
    """Moore detector for two consecutive high inputs.

    States: 0 idle, 1 one-seen, 2 detected (self-loop while high).
    The output is a function of the post-transition state.
    """

    TABLE = {
        (0, 0): 0, (0, 1): 1,
        (1, 0): 0, (1, 1): 2,
        (2, 0): 0, (2, 1): 2,
    }

    def reset(self):
        self.state = 0

    def step(self, inputs):
        if _int(inputs["reset"]):
            self.state = 0
        else:
            self.state = self.TABLE[(self.state, _int(inputs["in"]) & 1)]
        return {"out": int(self.state == 2)}

    def tags(self):
        return [f"S_{self.state}"]


class ChaosModel:
    """Answers the handshake, then emits a non-protocol line."""

    def reset(self):
        pass

    def step(self, inputs):
        raise _RawLine("this is not json")


class DiesModel:
    """Answers one cycle, then exits without a word."""

    def reset(self):
        self.steps = 0

    def step(self, inputs):
        self.steps += 1
        if self.steps > 1:
            raise _Die()
        return {k: 0 for k in _OUTPUT_PORTS}


class _RawLine(Exception):
    def __init__(self, line: str):
        self.line = line


class _Die(Exception):
    pass


MODELS = {
    "counter": CounterModel,
    "counter_lagged": CounterLaggedModel,
    "deadarm": DeadArmModel,
    "guarded": GuardedModel,
    "twostage": TwoStageModel,
    "fsm_seq": FsmSeqModel,
    "chaos": ChaosModel,
    "dies": DiesModel,
}

_OUTPUT_PORTS: list[str] = []


def serve(model, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def reply(obj) -> None:
        stdout.write(json.dumps(obj) + "\n")
        stdout.flush()

    def fail(message: str) -> int:
        reply({"type": "error", "message": message})
        return 1

    started = False
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            return fail("request is not JSON")
        kind = msg.get("type")
        if kind == "end":
            return 0
        if kind == "init":
            ports = msg.get("ports", {})
            _OUTPUT_PORTS.clear()
            _OUTPUT_PORTS.extend(ports.get("outputs", {}))
            model.reset()
            started = True
            reply({"type": "ok"})
            continue
        if kind == "cycle":
            if not started:
                return fail("cycle before init")
            inputs = msg.get("inputs")
            if not isinstance(inputs, dict):
                return fail("cycle request missing inputs")
            try:
                outputs = model.step(inputs)
            except _RawLine as raw:
                stdout.write(raw.line + "\n")
                stdout.flush()
                return 1
            except _Die:
                return 1
            except KeyError as exc:
                return fail(f"missing input port {exc.args[0]!r}")
            response = {"type": "out", "n": msg.get("n"),
                        "outputs": {k: _hex(v) for k, v in outputs.items()}}
            if hasattr(model, "tags"):
                response["tags"] = model.tags()
            reply(response)
            continue
        return fail(f"unknown request type {kind!r}")
    return 0


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1 or argv[0] not in MODELS:
        sys.stderr.write(
            f"usage: python -m veriloop.stub_oracle <{'|'.join(MODELS)}>\n")
        return 2
    return serve(MODELS[argv[0]]())


if __name__ == "__main__":
    sys.exit(main())
