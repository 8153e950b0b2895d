// Canvas drawing of the workspace scene.

import { ViewTransform } from "./transform.js";
import { SessionConfig, Point } from "./types.js";
import { ViewState, solenoidMarkers } from "./view.js";

const COLORS = {
  background: "#10141a",
  disk: "#1d2530",
  diskEdge: "#3a4a5e",
  solenoidOff: "#4a5a6e",
  solenoidOn: "#ffb347",
  particle: "#6ec6ff",
  trail: "#6ec6ff",
  path: "#4f8f4f",
  target: "#ff6b6b",
  stroke: "#c0a0ff",
  text: "#c8d2dc",
};

export function renderScene(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  cfg: SessionConfig,
  transform: ViewTransform,
): void {
  const { canvasWidth: w, canvasHeight: h } = transform;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, w, h);

  const centre = transform.toScreen([0, 0]);
  const radiusPx = cfg.workspace_radius_mm * transform.pxPerMm;
  ctx.beginPath();
  ctx.arc(centre[0], centre[1], radiusPx, 0, 2 * Math.PI);
  ctx.fillStyle = COLORS.disk;
  ctx.fill();
  ctx.strokeStyle = COLORS.diskEdge;
  ctx.lineWidth = 1.5;
  ctx.stroke();

  const states = view.solenoidStates();
  solenoidMarkers(cfg).forEach((pos, i) => {
    const [sx, sy] = transform.toScreen(pos);
    ctx.beginPath();
    ctx.arc(sx, sy, states[i] ? 11 : 8, 0, 2 * Math.PI);
    ctx.fillStyle = states[i] ? COLORS.solenoidOn : COLORS.solenoidOff;
    ctx.fill();
    ctx.fillStyle = COLORS.text;
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(String(i), sx, sy - 14);
  });

  drawPolyline(ctx, view.referencePath, transform, COLORS.path, 1.5, [5, 4]);
  drawPolyline(ctx, view.pendingStroke, transform, COLORS.stroke, 1.0, [2, 3]);

  view.trail.forEach((p, i) => {
    const [sx, sy] = transform.toScreen(p);
    ctx.globalAlpha = (i + 1) / view.trail.length;
    ctx.fillStyle = COLORS.trail;
    ctx.fillRect(sx - 1, sy - 1, 2, 2);
  });
  ctx.globalAlpha = 1;

  const target = view.target();
  if (target) {
    const [sx, sy] = transform.toScreen(target);
    ctx.strokeStyle = COLORS.target;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    ctx.moveTo(sx - 7, sy);
    ctx.lineTo(sx + 7, sy);
    ctx.moveTo(sx, sy - 7);
    ctx.lineTo(sx, sy + 7);
    ctx.stroke();
  }

  if (view.latest) {
    const [sx, sy] = transform.toScreen([view.latest.x_mm, view.latest.y_mm]);
    ctx.beginPath();
    ctx.arc(sx, sy, 6, 0, 2 * Math.PI);
    ctx.fillStyle = COLORS.particle;
    ctx.fill();
  }

  if (!view.connected) {
    ctx.fillStyle = "rgba(16, 20, 26, 0.65)";
    ctx.fillRect(0, 0, w, h);
    ctx.fillStyle = COLORS.text;
    ctx.font = "16px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("disconnected - reconnecting...", w / 2, h / 2);
  }
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  points: Point[],
  transform: ViewTransform,
  color: string,
  width: number,
  dash: number[],
): void {
  if (points.length < 2) return;
  ctx.beginPath();
  const [x0, y0] = transform.toScreen(points[0]);
  ctx.moveTo(x0, y0);
  for (const p of points.slice(1)) {
    const [sx, sy] = transform.toScreen(p);
    ctx.lineTo(sx, sy);
  }
  ctx.strokeStyle = color;
  ctx.lineWidth = width;
  ctx.setLineDash(dash);
  ctx.stroke();
  ctx.setLineDash([]);
}
