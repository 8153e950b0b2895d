// Invertible mapping between workspace millimetres (y up) and canvas pixels
// (y down), centred on the canvas.

import { Point } from "./types.js";

export class ViewTransform {
  constructor(
    public readonly canvasWidth: number,
    public readonly canvasHeight: number,
    public readonly mmRadius: number,
    public readonly marginPx = 40,
  ) {}

  get pxPerMm(): number {
    const usable = Math.min(this.canvasWidth, this.canvasHeight) / 2 - this.marginPx;
    return usable / this.mmRadius;
  }

  toScreen(p: Point): Point {
    const s = this.pxPerMm;
    return [this.canvasWidth / 2 + p[0] * s, this.canvasHeight / 2 - p[1] * s];
  }

  toWorkspace(screen: Point): Point {
    const s = this.pxPerMm;
    return [(screen[0] - this.canvasWidth / 2) / s, (this.canvasHeight / 2 - screen[1]) / s];
  }
}
