import { ReferenceModel } from "../model.js";

/**
 * The control-logic counter: counts up on 0x02, down on 0x00, clears on
 * 0xFF, holds on anything else; `out` is high exactly while the counter
 * sits at 1, visible in the same cycle the counter takes the value.
 */
export class CounterModel implements ReferenceModel {
  readonly inputs = ["reset", "in"] as const;
  private counter = 0;

  reset(): void {
    this.counter = 0;
  }

  step(inputs: Record<string, number>): Record<string, number> {
    if (inputs.reset) {
      this.counter = 0;
    } else {
      switch (inputs.in) {
        case 0x00:
          this.counter = (this.counter - 1) & 0xff;
          break;
        case 0x02:
          this.counter = (this.counter + 1) & 0xff;
          break;
        case 0xff:
          this.counter = 0;
          break;
        default:
          break; // hold
      }
    }
    return { out: this.counter === 1 ? 1 : 0 };
  }

  tags(): string[] {
    return ["C_" + this.counter.toString(16).padStart(2, "0")];
  }
}
