// Display model: everything drawn comes from StateEvents and the session
// config; the UI itself computes no control decisions.

import { decodePattern } from "./pattern.js";
import { SessionConfig, StateEvent, Point } from "./types.js";

export const TRAIL_LENGTH = 300;

export class ViewState {
  latest: StateEvent | null = null;
  trail: Point[] = [];
  trailTicks: number[] = [];
  referencePath: Point[] = [];
  pendingStroke: Point[] = [];
  optimisticTarget: Point | null = null;
  connected = false;

  applyEvent(event: StateEvent): void {
    this.latest = event;
    const last = this.trailTicks[this.trailTicks.length - 1];
    if (last === undefined || event.tick > last) {
      this.trail.push([event.x_mm, event.y_mm]);
      this.trailTicks.push(event.tick);
      if (this.trail.length > TRAIL_LENGTH) {
        this.trail.shift();
        this.trailTicks.shift();
      }
    }
    // the stream confirmed a target; drop the optimistic marker
    if (event.tx_mm !== null) this.optimisticTarget = null;
  }

  /** Solenoid fill states, straight from the last event's pattern bits. */
  solenoidStates(): boolean[] {
    return decodePattern(this.latest ? this.latest.pattern : 0);
  }

  target(): Point | null {
    if (this.optimisticTarget) return this.optimisticTarget;
    if (this.latest && this.latest.tx_mm !== null && this.latest.ty_mm !== null) {
      return [this.latest.tx_mm, this.latest.ty_mm];
    }
    return null;
  }
}

export function solenoidMarkers(cfg: SessionConfig): Point[] {
  return cfg.solenoids.map((s) => {
    const a = (s.angle_deg * Math.PI) / 180;
    return [s.tip_radius_mm * Math.cos(a), s.tip_radius_mm * Math.sin(a)];
  });
}
