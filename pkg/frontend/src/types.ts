// Wire types of the control service.

export interface StateEvent {
  tick: number;
  t_s: number;
  x_mm: number;
  y_mm: number;
  tx_mm: number | null;
  ty_mm: number | null;
  pattern: number;
  mode: string;
  err_mm: number | null;
}

export interface SolenoidInfo {
  index: number;
  angle_deg: number;
  tip_radius_mm: number;
  class: string;
  gain: number;
}

export interface SessionConfig {
  workspace_radius_mm: number;
  tick_rate_hz: number;
  current_a: number;
  deadband_mm: number;
  supply: { slope_a_per_v: number; offset_a: number };
  solenoids: SolenoidInfo[];
}

export interface PathFile {
  kind: string;
  params: Record<string, unknown>;
  spacing_mm: number;
  points_mm: [number, number][];
}

export type Point = [number, number];
