"""Closed-loop core shared by the batch harness and the HTTP service.

A ControlSession owns one plant, one controller configuration and a small
mode machine (idle / servo_to_point / follow_path / hold).  Each tick it
measures the particle (directly, or through the synthetic camera), asks the
controller for a pattern, steps the plant and records a StateEvent.  The
service wraps this with transport and timing; the harness drives it in a
plain loop — both therefore produce identical dynamics for identical
(seed, config) inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .pattern import ActuationPattern
from .plant import CALIBRATION_CURRENT_A, ParticleState, Plant, PlantParams, VelocityModel
from .servo import ControllerWeights, PathFollower, make_scene, solve_pattern
from .vision import CameraModel, locate_particle, render_frame
from .workspace import WorkspaceConfig

Mode = Literal["idle", "servo_to_point", "follow_path", "hold"]
MeasureMode = Literal["oracle", "vision"]


@dataclass(frozen=True)
class StateEvent:
    """One tick's published state; the NDJSON stream emits exactly these fields."""

    tick: int
    t_s: float
    x_mm: float
    y_mm: float
    tx_mm: float | None
    ty_mm: float | None
    pattern: int
    mode: str
    err_mm: float | None
    commanded_speed: float = 0.0  # kept for logs; not part of the wire format

    def to_json(self) -> str:
        return json.dumps(
            {
                "tick": self.tick,
                "t_s": self.t_s,
                "x_mm": self.x_mm,
                "y_mm": self.y_mm,
                "tx_mm": self.tx_mm,
                "ty_mm": self.ty_mm,
                "pattern": self.pattern,
                "mode": self.mode,
                "err_mm": self.err_mm,
            },
            separators=(",", ":"),
        )


class ControlSession:
    """Plant + controller + mode machine, advanced one tick at a time."""

    def __init__(
        self,
        cfg: WorkspaceConfig,
        model: VelocityModel,
        params: PlantParams,
        weights: ControllerWeights | None = None,
        current: float = CALIBRATION_CURRENT_A,
        start: tuple[float, float] = (0.0, 0.0),
        measure_mode: MeasureMode = "oracle",
        camera: CameraModel | None = None,
        particle: ParticleState | None = None,
    ) -> None:
        self.cfg = cfg
        self.model = model
        self.weights = weights if weights is not None else ControllerWeights()
        self.current = current
        self.measure_mode = measure_mode
        self.camera = camera if camera is not None else CameraModel()
        self._start = tuple(start)
        # independent deterministic streams for plant drift and camera noise
        plant_seed, camera_seed = np.random.SeedSequence(params.seed).spawn(2)
        self._camera_rng = np.random.default_rng(camera_seed)
        base = particle if particle is not None else ParticleState()
        state = ParticleState(
            position=self._start, velocity=(0.0, 0.0), diameter=base.diameter, label=base.label
        )
        self.plant = Plant(
            cfg,
            model,
            params,
            state=state,
            current=current,
            rng=np.random.default_rng(plant_seed),
        )
        self.mode: Mode = "idle"
        self.paused = False
        self.tick_count = 0
        self.target: np.ndarray | None = None
        self.follower: PathFollower | None = None
        self.path_completed = False
        self.events: list[StateEvent] = []
        self._last_measured = np.asarray(self._start, dtype=float)

    # -- commands -------------------------------------------------------

    def _check_inside(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if math.hypot(p[0], p[1]) > self.cfg.workspace_radius:
            raise ValueError("point outside the workspace")
        return p

    def set_target(self, point) -> None:
        self.target = self._check_inside(point)
        self.follower = None
        self.path_completed = False
        self.mode = "servo_to_point"

    def set_path(self, samples) -> None:
        samples = np.asarray(samples, dtype=float)
        if np.hypot(samples[:, 0], samples[:, 1]).max() > self.cfg.workspace_radius:
            raise ValueError("path leaves the workspace")
        self.follower = PathFollower(samples, self.weights)
        self.target = None
        self.path_completed = False
        self.mode = "follow_path"

    def pause(self) -> None:
        self.paused = True

    def resume(self) -> None:
        self.paused = False

    def reset(self, start: tuple[float, float] | None = None) -> None:
        """Re-place the particle and return to idle; the event log restarts."""
        if start is not None:
            self._start = tuple(self._check_inside(start))
        self.plant.reset(
            ParticleState(
                position=self._start,
                velocity=(0.0, 0.0),
                diameter=self.plant.state.diameter,
                label=self.plant.state.label,
            )
        )
        self.mode = "idle"
        self.paused = False
        self.target = None
        self.follower = None
        self.path_completed = False
        self.tick_count = 0
        self.events = []
        self._last_measured = np.asarray(self._start, dtype=float)

    def set_current(self, current: float) -> None:
        if current < 0:
            raise ValueError("current must be non-negative")
        self.current = current
        self.plant.current = current

    # -- measurement ------------------------------------------------------

    def measure(self) -> np.ndarray:
        """Particle position as the controller sees it (mm)."""
        if self.measure_mode == "oracle":
            measured = np.asarray(self.plant.state.position, dtype=float)
        else:
            frame = render_frame(self.plant.state, self.camera, self._camera_rng)
            found = locate_particle(frame, self.camera)
            measured = self._last_measured if found is None else found
        # keep within the disk; detection noise may spill slightly past the rim
        norm = math.hypot(measured[0], measured[1])
        if norm > self.cfg.workspace_radius:
            measured = measured * (self.cfg.workspace_radius / norm)
        self._last_measured = measured
        return measured

    # -- loop ------------------------------------------------------------

    def tick(self, dt: float | None = None) -> StateEvent:
        """Advance one control tick and return the resulting event."""
        dt = self.cfg.tick_dt if dt is None else dt
        pattern = ActuationPattern.all_off()
        target: np.ndarray | None = self.target
        if not self.paused and self.mode != "idle":
            measured = self.measure()
            if self.mode == "follow_path":
                assert self.follower is not None
                target = self.follower.advance(measured)
                final = self.follower.final
                if (
                    self.follower.carrot_is_final
                    and math.hypot(measured[0] - final[0], measured[1] - final[1])
                    <= self.weights.deadband
                ):
                    # terminal sample reached: park and hold there
                    self.path_completed = True
                    self.target = final
                    self.follower = None
                    self.mode = "hold"
            elif self.mode == "servo_to_point":
                assert self.target is not None
                if (
                    math.hypot(
                        measured[0] - self.target[0], measured[1] - self.target[1]
                    )
                    <= self.weights.deadband
                ):
                    self.mode = "hold"
                target = self.target
            else:  # hold
                target = self.target
            if target is not None and not (
                math.hypot(measured[0] - target[0], measured[1] - target[1])
                <= self.weights.deadband
            ):
                scene = make_scene(measured, target, self.cfg, self.model, self.current)
                pattern = solve_pattern(scene, self.weights)
        v_cmd = self.plant.commanded_velocity(pattern)
        state = self.plant.step(pattern, dt)
        self.tick_count += 1
        err = None
        if target is not None:
            err = math.hypot(state.position[0] - target[0], state.position[1] - target[1])
        event = StateEvent(
            tick=self.tick_count,
            t_s=self.tick_count * dt,
            x_mm=state.position[0],
            y_mm=state.position[1],
            tx_mm=None if target is None else float(target[0]),
            ty_mm=None if target is None else float(target[1]),
            pattern=pattern.code,
            mode=self.mode,
            err_mm=err,
            commanded_speed=float(math.hypot(v_cmd[0], v_cmd[1])),
        )
        self.events.append(event)
        return event

    def snapshot(self) -> StateEvent:
        """Current state without advancing (used before the first tick)."""
        if self.events:
            return self.events[-1]
        pos = self.plant.state.position
        return StateEvent(
            tick=0,
            t_s=0.0,
            x_mm=pos[0],
            y_mm=pos[1],
            tx_mm=None,
            ty_mm=None,
            pattern=0,
            mode=self.mode,
            err_mm=None,
        )
