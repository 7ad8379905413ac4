/** Behavioral contract every reference model implements. */

export interface ReferenceModel {
  /** Names of input ports a cycle request must carry. */
  readonly inputs: readonly string[];
  /** Back to the initial state (called on the init handshake). */
  reset(): void;
  /**
   * Advance one clock cycle; returns the post-edge outputs — the same
   * convention the DUT simulator records.  Deterministic.
   */
  step(inputs: Record<string, number>): Record<string, number>;
  /** Optional opaque coverage tags for the cycle just executed. */
  tags?(): string[];
}
