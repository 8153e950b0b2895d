// Bootstrap: create a session, wire controls, consume the stream, render.

import { ServiceClient } from "./api.js";
import { Controls } from "./controls.js";
import { EventMailbox, consumeStream } from "./mailbox.js";
import { renderScene } from "./render.js";
import { ViewTransform } from "./transform.js";
import { Point, SessionConfig } from "./types.js";
import { ViewState } from "./view.js";
import { clampCurrent, voltageForCurrent, CURRENT_MIN_A, CURRENT_MAX_A } from "./volts.js";

const canvasEl = document.getElementById("workspace") as HTMLCanvasElement | null;
if (!canvasEl) throw new Error("canvas #workspace not found");
const canvas: HTMLCanvasElement = canvasEl;
const context = canvas.getContext("2d");
if (!context) throw new Error("2D context unavailable");
const ctx: CanvasRenderingContext2D = context;

const statusEl = document.getElementById("status") as HTMLSpanElement;
const warnEl = document.getElementById("warning") as HTMLSpanElement;
const currentSlider = document.getElementById("current") as HTMLInputElement;
const currentLabel = document.getElementById("currentLabel") as HTMLSpanElement;
const presetSelect = document.getElementById("preset") as HTMLSelectElement;
const drawButton = document.getElementById("drawPath") as HTMLButtonElement;
const pauseButton = document.getElementById("pause") as HTMLButtonElement;
const resumeButton = document.getElementById("resume") as HTMLButtonElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;

const client = new ServiceClient("");
const view = new ViewState();
const mailbox = new EventMailbox();

let warnTimer: number | undefined;
function warn(message: string): void {
  warnEl.textContent = message;
  window.clearTimeout(warnTimer);
  warnTimer = window.setTimeout(() => (warnEl.textContent = ""), 2500);
}

async function boot(): Promise<void> {
  const sessionId = await client.createSession({});
  const cfg: SessionConfig = await client.config(sessionId);

  const transform = () =>
    new ViewTransform(canvas.width, canvas.height, Math.max(6.0, cfg.workspace_radius_mm + 1.5));
  const controls = new Controls({
    client,
    sessionId,
    transform,
    workspaceRadius: cfg.workspace_radius_mm,
    view,
    warn,
  });

  // -- click to target / stroke drawing ---------------------------------
  let drawMode = false;
  let stroke: Point[] = [];
  drawButton.addEventListener("click", () => {
    drawMode = !drawMode;
    drawButton.textContent = drawMode ? "finish path" : "draw path";
    if (!drawMode && stroke.length >= 2) {
      controls.submitStroke(stroke).then((points) => {
        if (points) view.referencePath = points;
      });
      stroke = [];
      view.pendingStroke = [];
    }
  });

  function canvasPoint(ev: MouseEvent): Point {
    const rect = canvas.getBoundingClientRect();
    return [ev.clientX - rect.left, ev.clientY - rect.top];
  }

  let pointerDown = false;
  canvas.addEventListener("mousedown", (ev) => {
    if (!drawMode) return;
    pointerDown = true;
    stroke = [transform().toWorkspace(canvasPoint(ev))];
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!drawMode || !pointerDown) return;
    stroke.push(transform().toWorkspace(canvasPoint(ev)));
    view.pendingStroke = stroke;
  });
  canvas.addEventListener("mouseup", () => (pointerDown = false));
  canvas.addEventListener("click", (ev) => {
    if (drawMode) return;
    controls.clickToTarget(canvasPoint(ev));
  });

  // -- presets and parameters -------------------------------------------
  presetSelect.addEventListener("change", () => {
    if (presetSelect.value) controls.submitPreset(presetSelect.value);
  });
  currentSlider.min = String(CURRENT_MIN_A);
  currentSlider.max = String(CURRENT_MAX_A);
  currentSlider.step = "0.01";
  currentSlider.value = String(cfg.current_a);
  const updateCurrentLabel = () => {
    const amps = clampCurrent(Number(currentSlider.value));
    const volts = voltageForCurrent(amps, cfg.supply.slope_a_per_v, cfg.supply.offset_a);
    currentLabel.textContent = `${amps.toFixed(2)} A (~${volts.toFixed(1)} V)`;
  };
  updateCurrentLabel();
  currentSlider.addEventListener("input", updateCurrentLabel);
  currentSlider.addEventListener("change", () => {
    controls.tuneCurrent(clampCurrent(Number(currentSlider.value)));
  });
  pauseButton.addEventListener("click", () => client.pause(sessionId));
  resumeButton.addEventListener("click", () => client.resume(sessionId));
  resetButton.addEventListener("click", () => client.reset(sessionId));

  // -- stream consumption with reconnect --------------------------------
  async function streamLoop(): Promise<void> {
    for (;;) {
      try {
        const response = await fetch(client.streamUrl(sessionId));
        if (!response.ok || !response.body) throw new Error(`stream ${response.status}`);
        view.connected = true;
        statusEl.textContent = "live";
        await consumeStream(response.body, mailbox);
      } catch {
        // fall through to reconnect
      }
      view.connected = false;
      statusEl.textContent = "reconnecting";
      await new Promise((resolve) => setTimeout(resolve, 500));
    }
  }
  void streamLoop();

  // -- render loop: latest-wins, never waits on the network ---------------
  function frame(): void {
    const fresh = mailbox.takeFresh();
    if (fresh) view.applyEvent(fresh);
    renderScene(ctx, view, cfg, transform());
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

boot().catch((err) => {
  statusEl.textContent = `failed to start: ${err}`;
});
