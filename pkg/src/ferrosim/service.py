"""HTTP host for live closed-loop sessions.

Each session owns a ControlSession plus either a wall-clock ticker thread
(default; real-time at the rig tick rate) or, in turbo mode, an on-demand
runner that advances ticks as fast as possible when asked.  Client commands
are queued and applied between ticks; state is published as immutable
snapshots, and slow stream consumers get the latest event rather than a
backlog (latest-wins), so they can never stall the loop.

Wire format: JSON bodies, NDJSON event stream, trajectory CSV identical to
the batch harness's.
"""

from __future__ import annotations

import math
import queue
import threading
import time
import uuid
from pathlib import Path
from typing import Callable

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse, PlainTextResponse, StreamingResponse
from pydantic import BaseModel, Field

from .harness import TrajectoryLog, _metadata
from .paths import DATA_DIR, PRESET_NAMES, preset_path, resample_polyline
from .plant import CALIBRATION_CURRENT_A, GAIN_PRESETS, PlantParams, make_model, preset_name
from .servo import ControllerWeights
from .session import ControlSession
from .workspace import default_rig, rig_from_dict


class WeightsBody(BaseModel):
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    deadband: float | None = None
    lookahead: float | None = None


class PlantBody(BaseModel):
    lag_tau: float | None = None
    drift_rms: float | None = None
    drift_corr_time: float | None = None


class CreateSessionBody(BaseModel):
    seed: int = 0
    current_a: float = CALIBRATION_CURRENT_A
    preset: str = "unit"
    law: str = "inverse"
    start: tuple[float, float] = (0.0, 0.0)
    measure_mode: str = "oracle"
    turbo: bool = False
    weights: WeightsBody | None = None
    plant: PlantBody | None = None
    rig: dict | None = None


class TargetBody(BaseModel):
    x_mm: float
    y_mm: float


class PathBody(BaseModel):
    points: list[tuple[float, float]] | None = None
    preset: str | None = None
    resample: bool = True


class ParamsBody(BaseModel):
    current_a: float | None = None
    weights: WeightsBody | None = None
    preset: str | None = None


class RunBody(BaseModel):
    ticks: int = Field(default=0, ge=0)
    until_done: bool = False
    max_ticks: int = Field(default=100_000, gt=0)


def _merge_weights(base: ControllerWeights, body: WeightsBody | None) -> ControllerWeights:
    if body is None:
        return base
    fields = {k: v for k, v in body.model_dump().items() if v is not None}
    return ControllerWeights(
        alpha=fields.get("alpha", base.alpha),
        beta=fields.get("beta", base.beta),
        gamma=fields.get("gamma", base.gamma),
        deadband=fields.get("deadband", base.deadband),
        lookahead=fields.get("lookahead", base.lookahead),
        corridor=base.corridor,
    )


class SessionHost:
    """One live session: core loop, command queue, event publication."""

    def __init__(self, body: CreateSessionBody) -> None:
        self.id = uuid.uuid4().hex
        cfg = rig_from_dict(body.rig) if body.rig else default_rig()
        if body.preset not in GAIN_PRESETS:
            raise ValueError(f"unknown gain preset {body.preset!r}")
        model = make_model(body.preset, body.law)
        plant_body = body.plant or PlantBody()
        defaults = PlantParams()
        params = PlantParams(
            lag_tau=plant_body.lag_tau if plant_body.lag_tau is not None else defaults.lag_tau,
            drift_rms=plant_body.drift_rms
            if plant_body.drift_rms is not None
            else defaults.drift_rms,
            drift_corr_time=plant_body.drift_corr_time
            if plant_body.drift_corr_time is not None
            else defaults.drift_corr_time,
            seed=body.seed,
        )
        weights = _merge_weights(ControllerWeights(), body.weights)
        if body.measure_mode not in ("oracle", "vision"):
            raise ValueError("measure_mode must be 'oracle' or 'vision'")
        self.core = ControlSession(
            cfg,
            model,
            params,
            weights=weights,
            current=body.current_a,
            start=body.start,
            measure_mode=body.measure_mode,  # type: ignore[arg-type]
        )
        self.turbo = body.turbo
        self.commands: "queue.Queue[Callable[[ControlSession], None]]" = queue.Queue()
        self.cond = threading.Condition()
        self.latest = self.core.snapshot()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._run_lock = threading.Lock()
        if not self.turbo:
            self._thread = threading.Thread(target=self._loop, daemon=True)
            self._thread.start()

    # -- ticking ---------------------------------------------------------

    def _apply_commands(self) -> None:
        while True:
            try:
                command = self.commands.get_nowait()
            except queue.Empty:
                return
            command(self.core)

    def _advance(self) -> None:
        self._apply_commands()
        event = self.core.tick()
        with self.cond:
            self.latest = event
            self.cond.notify_all()

    def _loop(self) -> None:
        period = self.core.cfg.tick_dt
        next_tick = time.monotonic() + period
        while not self._stop.is_set():
            self._advance()
            delay = next_tick - time.monotonic()
            next_tick += period
            if delay > 0:
                if self._stop.wait(delay):
                    return
            else:
                # fell behind; realign rather than bursting
                next_tick = time.monotonic() + period

    def run(self, body: RunBody) -> dict:
        """Advance a turbo session synchronously."""
        if not self.turbo:
            raise ValueError("run is only available on turbo sessions")
        with self._run_lock:
            n = 0
            limit = body.max_ticks if body.until_done else max(body.ticks, 0)
            while n < limit:
                self._advance()
                n += 1
                if body.until_done and self.core.path_completed:
                    break
        return {"ticks_run": n, "completed": self.core.path_completed}

    def stop(self) -> None:
        self._stop.set()
        with self.cond:
            self.cond.notify_all()
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    # -- commands ----------------------------------------------------------

    def enqueue(self, command: Callable[[ControlSession], None]) -> None:
        self.commands.put(command)
        if self.turbo:
            # no ticker thread; apply eagerly so state reflects the command
            with self._run_lock:
                self._apply_commands()
                with self.cond:
                    self.latest = self.core.snapshot()
                    self.cond.notify_all()

    def log(self) -> TrajectoryLog:
        meta = _metadata(
            self.core.weights,
            self.core.plant.params,
            self.core.current,
            preset=preset_name(self.core.model),
            completed=self.core.path_completed,
        )
        return TrajectoryLog.from_events(list(self.core.events), meta)


class SessionManager:
    def __init__(self) -> None:
        self._hosts: dict[str, SessionHost] = {}
        self._lock = threading.Lock()

    def create(self, body: CreateSessionBody) -> SessionHost:
        host = SessionHost(body)
        with self._lock:
            self._hosts[host.id] = host
        return host

    def get(self, session_id: str) -> SessionHost:
        with self._lock:
            host = self._hosts.get(session_id)
        if host is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return host

    def drop(self, session_id: str) -> None:
        host = self.get(session_id)
        host.stop()
        with self._lock:
            self._hosts.pop(session_id, None)

    def stop_all(self) -> None:
        with self._lock:
            hosts = list(self._hosts.values())
            self._hosts.clear()
        for host in hosts:
            host.stop()


def create_app(static_dir: str | Path | None = None) -> FastAPI:
    from contextlib import asynccontextmanager

    manager = SessionManager()

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        manager.stop_all()

    app = FastAPI(title="ferrosim control service", lifespan=lifespan)
    app.state.manager = manager

    @app.post("/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        try:
            host = manager.create(body)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"id": host.id}

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str) -> dict:
        manager.drop(session_id)
        return {"ok": True}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        host = manager.get(session_id)
        with host.cond:
            event = host.latest
        import json as _json

        return _json.loads(event.to_json())

    @app.get("/sessions/{session_id}/config")
    def get_config(session_id: str) -> dict:
        core = manager.get(session_id).core
        cfg = core.cfg
        return {
            "workspace_radius_mm": cfg.workspace_radius,
            "tick_rate_hz": cfg.tick_rate,
            "current_a": core.current,
            "deadband_mm": core.weights.deadband,
            "supply": {"slope_a_per_v": cfg.supply.slope, "offset_a": cfg.supply.offset},
            "solenoids": [
                {
                    "index": s.index,
                    "angle_deg": math.degrees(s.angle),
                    "tip_radius_mm": s.tip_radius,
                    "class": s.kind.value,
                    "gain": s.gain,
                }
                for s in cfg.solenoids
            ],
        }

    @app.post("/sessions/{session_id}/target")
    def set_target(session_id: str, body: TargetBody) -> dict:
        host = manager.get(session_id)
        point = np.array([body.x_mm, body.y_mm])
        if float(np.hypot(point[0], point[1])) > host.core.cfg.workspace_radius:
            raise HTTPException(status_code=400, detail="target outside the workspace")
        host.enqueue(lambda core: core.set_target(point))
        return {"ok": True}

    @app.post("/sessions/{session_id}/path")
    def set_path(session_id: str, body: PathBody) -> dict:
        host = manager.get(session_id)
        if body.preset is not None:
            if body.preset not in PRESET_NAMES:
                raise HTTPException(status_code=400, detail=f"unknown preset {body.preset!r}")
            samples = preset_path(body.preset).samples
        elif body.points is not None and len(body.points) >= 2:
            try:
                samples = (
                    resample_polyline(body.points) if body.resample else np.asarray(body.points)
                )
            except ValueError as exc:
                raise HTTPException(status_code=400, detail=str(exc))
        else:
            raise HTTPException(status_code=400, detail="need points (>= 2) or a preset name")
        radius = host.core.cfg.workspace_radius
        if float(np.hypot(samples[:, 0], samples[:, 1]).max()) > radius:
            raise HTTPException(status_code=400, detail="path leaves the workspace")
        host.enqueue(lambda core: core.set_path(samples))
        return {"ok": True, "n_samples": int(len(samples))}

    @app.post("/sessions/{session_id}/params")
    def set_params(session_id: str, body: ParamsBody) -> dict:
        host = manager.get(session_id)
        if body.current_a is not None and body.current_a < 0:
            raise HTTPException(status_code=400, detail="current must be non-negative")
        if body.preset is not None and body.preset not in GAIN_PRESETS:
            raise HTTPException(status_code=400, detail=f"unknown gain preset {body.preset!r}")

        def apply(core: ControlSession) -> None:
            if body.current_a is not None:
                core.set_current(body.current_a)
            if body.weights is not None:
                core.weights = _merge_weights(core.weights, body.weights)
            if body.preset is not None:
                core.model = make_model(body.preset, core.model.law)
                core.plant.model = core.model

        host.enqueue(apply)
        return {"ok": True}

    @app.post("/sessions/{session_id}/pause")
    def pause(session_id: str) -> dict:
        manager.get(session_id).enqueue(lambda core: core.pause())
        return {"ok": True}

    @app.post("/sessions/{session_id}/resume")
    def resume(session_id: str) -> dict:
        manager.get(session_id).enqueue(lambda core: core.resume())
        return {"ok": True}

    @app.post("/sessions/{session_id}/reset")
    def reset(session_id: str) -> dict:
        manager.get(session_id).enqueue(lambda core: core.reset())
        return {"ok": True}

    @app.post("/sessions/{session_id}/run")
    def run(session_id: str, body: RunBody) -> dict:
        host = manager.get(session_id)
        try:
            return host.run(body)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str):
        host = manager.get(session_id)

        def events():
            last_tick = -1
            while not host._stop.is_set():
                with host.cond:
                    if host.latest.tick <= last_tick:
                        host.cond.wait(timeout=0.5)
                    event = host.latest
                if event.tick > last_tick:
                    last_tick = event.tick
                    yield event.to_json() + "\n"

        return StreamingResponse(events(), media_type="application/x-ndjson")

    @app.get("/sessions/{session_id}/log.csv")
    def log_csv(session_id: str) -> PlainTextResponse:
        host = manager.get(session_id)
        return PlainTextResponse(host.log().to_csv(), media_type="text/csv")

    @app.get("/paths")
    def list_paths() -> dict:
        return {"presets": list(PRESET_NAMES)}

    @app.get("/paths/{name}.json")
    def get_path(name: str) -> FileResponse:
        file = DATA_DIR / f"{name}.json"
        if not file.exists():
            raise HTTPException(status_code=404, detail=f"no preset path {name!r}")
        return FileResponse(file, media_type="application/json")

    if static_dir is not None:
        static_dir = Path(static_dir)
        if static_dir.is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    port: int = 8000, host: str = "127.0.0.1", static_dir: str | Path | None = None
) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(static_dir=static_dir), host=host, port=port, log_level="warning")
