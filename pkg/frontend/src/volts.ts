// Voltage-equivalent readout for the current slider, from the rig's linear
// current-voltage map, clamped to the 2-6 V drive range.

export function voltageForCurrent(
  amps: number,
  slopeAPerV: number,
  offsetA: number,
): number {
  const volts = (amps - offsetA) / slopeAPerV;
  return Math.min(6, Math.max(2, Math.round(volts * 10) / 10));
}

export const CURRENT_MIN_A = 0.24;
export const CURRENT_MAX_A = 1.66;

export function clampCurrent(amps: number): number {
  return Math.min(CURRENT_MAX_A, Math.max(CURRENT_MIN_A, amps));
}
