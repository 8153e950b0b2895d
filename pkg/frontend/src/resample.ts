// Client-side stroke conditioning: clip to the workspace disk, then resample
// to the shared 0.05 mm spacing by arc length (matching the server's path
// sampling: n = round(length / spacing) intervals, endpoints exact).

import { Point } from "./types.js";

export const SAMPLE_SPACING_MM = 0.05;

export function resampleStroke(points: Point[], spacing = SAMPLE_SPACING_MM): Point[] {
  if (points.length < 2) throw new Error("stroke needs at least two points");
  const kept: Point[] = [points[0]];
  for (const p of points.slice(1)) {
    const last = kept[kept.length - 1];
    if (Math.hypot(p[0] - last[0], p[1] - last[1]) > 1e-12) kept.push(p);
  }
  if (kept.length < 2) throw new Error("stroke has zero length");
  const segLen: number[] = [];
  let total = 0;
  for (let i = 1; i < kept.length; i++) {
    const len = Math.hypot(kept[i][0] - kept[i - 1][0], kept[i][1] - kept[i - 1][1]);
    segLen.push(len);
    total += len;
  }
  const n = Math.max(1, Math.round(total / spacing));
  const out: Point[] = [];
  let seg = 0;
  let segStart = 0; // arc position where the current segment begins
  for (let k = 0; k <= n; k++) {
    const target = (total * k) / n;
    while (seg < segLen.length - 1 && segStart + segLen[seg] < target) {
      segStart += segLen[seg];
      seg += 1;
    }
    const frac = segLen[seg] > 0 ? (target - segStart) / segLen[seg] : 0;
    const a = kept[seg];
    const b = kept[seg + 1];
    out.push([a[0] + (b[0] - a[0]) * frac, a[1] + (b[1] - a[1]) * frac]);
  }
  out[out.length - 1] = kept[kept.length - 1];
  return out;
}

export interface ClipResult {
  points: Point[];
  clipped: boolean;
}

/** Drop stroke points outside the workspace disk; flag if anything was cut. */
export function clipToWorkspace(points: Point[], radiusMm: number): ClipResult {
  const inside = points.filter((p) => Math.hypot(p[0], p[1]) <= radiusMm);
  return { points: inside, clipped: inside.length !== points.length };
}
