// Interaction handlers, kept free of DOM wiring so they are unit-testable:
// click-to-target, stroke capture, preset selection, parameter tuning.

import { ServiceClient } from "./api.js";
import { clipToWorkspace, resampleStroke } from "./resample.js";
import { ViewTransform } from "./transform.js";
import { Point } from "./types.js";
import { ViewState } from "./view.js";

export interface ControlsDeps {
  client: ServiceClient;
  sessionId: string;
  transform: () => ViewTransform;
  workspaceRadius: number;
  view: ViewState;
  warn?: (message: string) => void;
}

export class Controls {
  constructor(private readonly deps: ControlsDeps) {}

  /** Click inside the disk posts the inverse-transformed point; outside is a no-op. */
  async clickToTarget(screen: Point): Promise<Point | null> {
    const point = this.deps.transform().toWorkspace(screen);
    if (Math.hypot(point[0], point[1]) > this.deps.workspaceRadius) {
      this.deps.warn?.("target outside the workspace");
      return null;
    }
    this.deps.view.optimisticTarget = point; // drawn now, confirmed by the stream
    await this.deps.client.setTarget(this.deps.sessionId, point);
    return point;
  }

  /** Resample a pointer stroke (workspace mm) and post it as the new path. */
  async submitStroke(strokeMm: Point[]): Promise<Point[] | null> {
    const { points, clipped } = clipToWorkspace(strokeMm, this.deps.workspaceRadius);
    if (clipped) this.deps.warn?.("stroke clipped to the workspace");
    if (points.length < 2) {
      this.deps.warn?.("stroke too short");
      return null;
    }
    let resampled: Point[];
    try {
      resampled = resampleStroke(points);
    } catch {
      this.deps.warn?.("stroke has no length");
      return null;
    }
    await this.deps.client.setPath(this.deps.sessionId, resampled);
    return resampled;
  }

  /** Load a shared preset path file and post its points verbatim. */
  async submitPreset(name: string): Promise<Point[]> {
    const file = await this.deps.client.fetchPresetPath(name);
    const points = file.points_mm as Point[];
    await this.deps.client.setPath(this.deps.sessionId, points);
    this.deps.view.referencePath = points;
    return points;
  }

  async tuneCurrent(amps: number): Promise<void> {
    await this.deps.client.setParams(this.deps.sessionId, { current_a: amps });
  }
}
