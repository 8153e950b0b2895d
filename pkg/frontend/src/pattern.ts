// The pattern code is an 8-bit integer, bit i = solenoid i ON.

export function decodePattern(code: number): boolean[] {
  if (!Number.isInteger(code) || code < 0 || code > 255) {
    throw new Error(`pattern code out of range: ${code}`);
  }
  const bits: boolean[] = [];
  for (let i = 0; i < 8; i++) bits.push(((code >> i) & 1) === 1);
  return bits;
}
