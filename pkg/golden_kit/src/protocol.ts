/**
 * One protocol session over line-delimited JSON:
 *
 *   -> {"type":"init","ports":{"inputs":{...},"outputs":{...}}}
 *   <- {"type":"ok"}
 *   -> {"type":"cycle","n":N,"inputs":{"reset":"0x1",...}}
 *   <- {"type":"out","n":N,"outputs":{"out":"0x0"},"tags":[...]}
 *   -> {"type":"end"}          (no response; resolves with exit code 0)
 *
 * Any malformed request yields one {"type":"error",...} response and a
 * nonzero exit code.
 */

import { Readable, Writable } from "node:stream";

import { ReferenceModel } from "./model.js";
import { formatValue, parseValue } from "./values.js";

export function serve(
  model: ReferenceModel,
  input: Readable,
  output: Writable,
): Promise<number> {
  return new Promise((resolve) => {
    let buffer = "";
    let started = false;
    let done = false;

    const reply = (obj: unknown): void => {
      output.write(JSON.stringify(obj) + "\n");
    };

    const finish = (code: number): void => {
      if (!done) {
        done = true;
        resolve(code);
      }
    };

    const fail = (message: string): void => {
      reply({ type: "error", message });
      finish(1);
    };

    const handle = (line: string): void => {
      let msg: any;
      try {
        msg = JSON.parse(line);
      } catch {
        fail("request is not JSON");
        return;
      }
      switch (msg?.type) {
        case "end":
          finish(0);
          return;
        case "init":
          model.reset();
          started = true;
          reply({ type: "ok" });
          return;
        case "cycle": {
          if (!started) {
            fail("cycle before init");
            return;
          }
          if (typeof msg.inputs !== "object" || msg.inputs === null) {
            fail("cycle request missing inputs");
            return;
          }
          const inputs: Record<string, number> = {};
          for (const name of model.inputs) {
            if (!(name in msg.inputs)) {
              fail(`missing input port '${name}'`);
              return;
            }
            try {
              inputs[name] = parseValue(msg.inputs[name]);
            } catch (err) {
              fail(`bad value for '${name}': ${(err as Error).message}`);
              return;
            }
          }
          const outputs = model.step(inputs);
          const rendered: Record<string, string> = {};
          for (const [name, value] of Object.entries(outputs)) {
            rendered[name] = formatValue(value);
          }
          const response: Record<string, unknown> = {
            type: "out",
            n: msg.n,
            outputs: rendered,
          };
          if (model.tags) {
            response.tags = model.tags();
          }
          reply(response);
          return;
        }
        default:
          fail(`unknown request type ${JSON.stringify(msg?.type)}`);
      }
    };

    input.on("data", (chunk: Buffer | string) => {
      if (done) {
        return;
      }
      buffer += chunk.toString();
      for (;;) {
        const idx = buffer.indexOf("\n");
        if (idx === -1 || done) {
          break;
        }
        const line = buffer.slice(0, idx).trim();
        buffer = buffer.slice(idx + 1);
        if (line) {
          handle(line);
        }
      }
    });
    input.on("end", () => finish(0));
    input.on("error", () => finish(1));
  });
}
