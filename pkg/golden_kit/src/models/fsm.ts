import { ReferenceModel } from "../model.js";

/**
 * A three-state Moore machine detecting two consecutive high inputs.
 *
 * Transition table (state, in) -> next state:
 *
 *   | state        | in=0 | in=1 |
 *   |--------------|------|------|
 *   | 0 idle       |  0   |  1   |
 *   | 1 one-seen   |  0   |  2   |
 *   | 2 detected   |  0   |  2   |
 *
 * `out` is 1 exactly in state 2; `reset` returns to state 0.  Its
 * bundled initial test sequence lives in seeds/fsm_seed.json.
 */
const TABLE: Record<number, [number, number]> = {
  0: [0, 1],
  1: [0, 2],
  2: [0, 2],
};

export class FsmModel implements ReferenceModel {
  readonly inputs = ["reset", "in"] as const;
  private state = 0;

  reset(): void {
    this.state = 0;
  }

  step(inputs: Record<string, number>): Record<string, number> {
    if (inputs.reset) {
      this.state = 0;
    } else {
      this.state = TABLE[this.state][inputs.in & 1];
    }
    return { out: this.state === 2 ? 1 : 0 };
  }

  tags(): string[] {
    return ["S_" + this.state.toString()];
  }
}
