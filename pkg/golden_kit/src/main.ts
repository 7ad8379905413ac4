/** CLI entry: `node dist/main.js <counter|fsm>` serves one session. */

import { CounterModel } from "./models/counter.js";
import { FsmModel } from "./models/fsm.js";
import { serve } from "./protocol.js";

const MODELS: Record<string, () => import("./model.js").ReferenceModel> = {
  counter: () => new CounterModel(),
  fsm: () => new FsmModel(),
};

async function main(): Promise<number> {
  const name = process.argv[2];
  const factory = name ? MODELS[name] : undefined;
  if (!factory) {
    process.stderr.write(
      `usage: node main.js <${Object.keys(MODELS).join("|")}>\n`,
    );
    return 2;
  }
  return serve(factory(), process.stdin, process.stdout);
}

main().then((code) => process.exit(code));
