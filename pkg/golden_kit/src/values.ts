/** Hex-string value encoding shared by every protocol message. */

export function formatValue(value: number): string {
  return "0x" + value.toString(16);
}

export function parseValue(raw: unknown): number {
  if (typeof raw === "number") {
    return raw;
  }
  if (typeof raw !== "string") {
    throw new Error(`bad value ${JSON.stringify(raw)}`);
  }
  const text = raw.trim().toLowerCase();
  const value = text.startsWith("0x")
    ? parseInt(text.slice(2), 16)
    : /^[0-9]+$/.test(text)
      ? parseInt(text, 10)
      : parseInt(text, 16);
  if (Number.isNaN(value)) {
    throw new Error(`bad value ${JSON.stringify(raw)}`);
  }
  return value;
}

export function mask(value: number, width: number): number {
  // Widths used by the bundled models stay well under 2^31.
  return value & ((1 << width) - 1);
}
