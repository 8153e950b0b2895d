"""Repeatable closed-loop trials, the error/velocity statistics and CSV export.

Everything here is seeded: the same (seed, config, path) always yields the
same log, byte for byte.  Error statistics pool all ticks of a trial (and
all trials of a batch) rather than averaging per-trial summaries.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .paths import ReferencePath
from .plant import (
    CALIBRATION_CURRENT_A,
    ParticleState,
    Plant,
    PlantParams,
    VelocityModel,
    make_model,
    preset_name,
)
from .pattern import ActuationPattern
from .servo import ControllerWeights
from .session import ControlSession, MeasureMode, StateEvent
from .vision import CameraModel
from .workspace import WorkspaceConfig, default_rig

CSV_HEADER = "t_s,x_mm,y_mm,tx_mm,ty_mm,pattern,err_mm"


@dataclass(frozen=True)
class TrajectoryLog:
    """Time-stamped record of one trial plus the settings that produced it."""

    t: np.ndarray  # (N,) s
    pos: np.ndarray  # (N, 2) mm
    target: np.ndarray  # (N, 2) mm, NaN while no target is active
    pattern: np.ndarray  # (N,) int codes 0..255
    commanded_speed: np.ndarray  # (N,) mm/s
    err: np.ndarray  # (N,) mm distance to the active target, NaN while idle
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_events(cls, events: list[StateEvent], metadata: dict) -> "TrajectoryLog":
        nan = float("nan")
        return cls(
            t=np.array([e.t_s for e in events]),
            pos=np.array([[e.x_mm, e.y_mm] for e in events]).reshape(-1, 2),
            target=np.array(
                [[nan if e.tx_mm is None else e.tx_mm, nan if e.ty_mm is None else e.ty_mm] for e in events]
            ).reshape(-1, 2),
            pattern=np.array([e.pattern for e in events], dtype=int),
            commanded_speed=np.array([e.commanded_speed for e in events]),
            err=np.array([nan if e.err_mm is None else e.err_mm for e in events]),
            metadata=metadata,
        )

    def __len__(self) -> int:
        return len(self.t)

    @property
    def completed(self) -> bool:
        return bool(self.metadata.get("completed", True))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        for i in range(len(self.t)):
            buf.write(
                f"{float(self.t[i])!r},{float(self.pos[i, 0])!r},{float(self.pos[i, 1])!r},"
                f"{float(self.target[i, 0])!r},{float(self.target[i, 1])!r},"
                f"{int(self.pattern[i])},{float(self.err[i])!r}\n"
            )
        return buf.getvalue()

    def write_csv(self, file: str | Path) -> None:
        Path(file).write_text(self.to_csv())


@dataclass(frozen=True)
class PathStats:
    """Pooled trial statistics; errors in micrometres, speeds in um/s."""

    mean_err: float = 0.0
    std_err: float = 0.0
    max_err: float = 0.0
    mean_v: float = 0.0
    std_v: float = 0.0
    max_v: float = 0.0

    def merged(self, other: "PathStats") -> "PathStats":
        """Combine the error half of self with the velocity half of other."""
        return PathStats(
            mean_err=self.mean_err,
            std_err=self.std_err,
            max_err=self.max_err,
            mean_v=other.mean_v,
            std_v=other.std_v,
            max_v=other.max_v,
        )


def polyline_distances(points: np.ndarray, samples: np.ndarray) -> np.ndarray:
    """Distance of each point to the continuous polyline (segment projection)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    a = samples[:-1]
    d = samples[1:] - a
    seg_sq = np.einsum("ij,ij->i", d, d)
    seg_sq[seg_sq == 0.0] = 1.0
    rel = points[:, None, :] - a[None, :, :]
    tproj = np.clip(np.einsum("pij,ij->pi", rel, d) / seg_sq, 0.0, 1.0)
    foot = rel - tproj[:, :, None] * d[None, :, :]
    return np.sqrt(np.einsum("pij,pij->pi", foot, foot)).min(axis=1)


def path_errors(log: TrajectoryLog, path: ReferencePath) -> PathStats:
    """Error half of the statistics: tick-wise distance to the reference."""
    if len(log) == 0:
        raise ValueError("empty log")
    err_um = polyline_distances(log.pos, path.samples) * 1e3
    return PathStats(
        mean_err=float(err_um.mean()),
        std_err=float(err_um.std()),
        max_err=float(err_um.max()),
    )


def velocity_stats(log: TrajectoryLog) -> PathStats:
    """Velocity half of the statistics, from finite differences of positions."""
    if len(log) < 2:
        raise ValueError("velocity statistics need at least two rows")
    dt = np.diff(log.t)
    steps = np.diff(log.pos, axis=0)
    v_ums = np.hypot(steps[:, 0], steps[:, 1]) / dt * 1e3
    return PathStats(
        mean_v=float(v_ums.mean()),
        std_v=float(v_ums.std()),
        max_v=float(v_ums.max()),
    )


def trial_stats(log: TrajectoryLog, path: ReferencePath) -> PathStats:
    return path_errors(log, path).merged(velocity_stats(log))


def pooled_stats(logs: list[TrajectoryLog], path: ReferencePath) -> PathStats:
    """Statistics over the pooled ticks of several repetitions."""
    err = np.concatenate([polyline_distances(log.pos, path.samples) for log in logs]) * 1e3
    speeds = []
    for log in logs:
        steps = np.diff(log.pos, axis=0)
        speeds.append(np.hypot(steps[:, 0], steps[:, 1]) / np.diff(log.t) * 1e3)
    v = np.concatenate(speeds)
    return PathStats(
        mean_err=float(err.mean()),
        std_err=float(err.std()),
        max_err=float(err.max()),
        mean_v=float(v.mean()),
        std_v=float(v.std()),
        max_v=float(v.max()),
    )


def stats_json(name: str, reps: int, stats: PathStats) -> dict:
    return {
        "path": name,
        "reps": reps,
        "mean_err_um": stats.mean_err,
        "std_err_um": stats.std_err,
        "max_err_um": stats.max_err,
        "mean_v_ums": stats.mean_v,
        "std_v_ums": stats.std_v,
        "max_v_ums": stats.max_v,
    }


def _metadata(weights: ControllerWeights, params: PlantParams, current: float, **extra) -> dict:
    meta = {
        "seed": params.seed,
        "weights": {
            "alpha": weights.alpha,
            "beta": weights.beta,
            "gamma": weights.gamma,
            "deadband": weights.deadband,
            "lookahead": weights.lookahead,
        },
        "current_a": current,
        "lag_tau_s": params.lag_tau,
        "drift_rms_mm_s": params.drift_rms,
    }
    meta.update(extra)
    return meta


def run_path_trial(
    path: ReferencePath,
    cfg: WorkspaceConfig | None = None,
    model: VelocityModel | None = None,
    plant_params: PlantParams | None = None,
    weights: ControllerWeights | None = None,
    current: float = CALIBRATION_CURRENT_A,
    mode: MeasureMode = "oracle",
    camera: CameraModel | None = None,
    start_offset: tuple[float, float] = (0.0, 0.0),
    timeout_s: float = 120.0,
) -> TrajectoryLog:
    """Follow `path` from its start until the terminal sample or a timeout.

    A timed-out log is marked incomplete in its metadata but remains fully
    analysable.
    """
    cfg = cfg if cfg is not None else default_rig()
    model = model if model is not None else make_model()
    plant_params = plant_params if plant_params is not None else PlantParams()
    weights = weights if weights is not None else ControllerWeights()
    start = (path.samples[0][0] + start_offset[0], path.samples[0][1] + start_offset[1])
    session = ControlSession(
        cfg,
        model,
        plant_params,
        weights=weights,
        current=current,
        start=start,
        measure_mode=mode,
        camera=camera,
    )
    session.set_path(path.samples)
    max_ticks = max(1, round(timeout_s * cfg.tick_rate))
    for _ in range(max_ticks):
        session.tick()
        if session.path_completed:
            break
    meta = _metadata(
        weights,
        plant_params,
        current,
        mode=mode,
        preset=preset_name(model),
        path_kind=path.kind.value,
        completed=session.path_completed,
    )
    return TrajectoryLog.from_events(session.events, meta)


def run_hold_trial(
    point: tuple[float, float],
    duration_s: float,
    cfg: WorkspaceConfig | None = None,
    model: VelocityModel | None = None,
    plant_params: PlantParams | None = None,
    weights: ControllerWeights | None = None,
    current: float = CALIBRATION_CURRENT_A,
    start: tuple[float, float] | None = None,
    approach_timeout_s: float = 30.0,
) -> TrajectoryLog:
    """Servo the particle to `point`, then hold it there for `duration_s`.

    Only the hold phase is logged; by default the particle starts at the
    hold point, so there is no approach phase.
    """
    cfg = cfg if cfg is not None else default_rig()
    model = model if model is not None else make_model()
    plant_params = plant_params if plant_params is not None else PlantParams()
    weights = weights if weights is not None else ControllerWeights()
    session = ControlSession(
        cfg,
        model,
        plant_params,
        weights=weights,
        current=current,
        start=point if start is None else start,
    )
    session.set_target(point)
    if start is not None:
        for _ in range(round(approach_timeout_s * cfg.tick_rate)):
            event = session.tick()
            if event.mode == "hold":
                break
        session.events = []
    for _ in range(round(duration_s * cfg.tick_rate)):
        session.tick()
    meta = _metadata(
        weights, plant_params, current, preset=preset_name(model), hold_point=list(point)
    )
    return TrajectoryLog.from_events(session.events, meta)


def hold_error_stats(log: TrajectoryLog) -> tuple[float, float, float]:
    """(mean, std, max) positioning error in micrometres over a hold log."""
    err_um = log.err * 1e3
    return float(err_um.mean()), float(err_um.std()), float(err_um.max())


ACTUATION_WINDOW_S = 1.0


def open_loop_sweep(
    cfg: WorkspaceConfig | None = None,
    model: VelocityModel | None = None,
    plant_params: PlantParams | None = None,
    distances: tuple[float, ...] = (2.7, 3.8, 4.9, 5.9, 7.0),
    current: float = CALIBRATION_CURRENT_A,
    reps: int = 5,
    solenoid: int = 0,
    seed: int = 0,
) -> list[dict]:
    """Actuation velocity (first-second mean) versus initial distance.

    The speed law is, by construction, the map from initial distance to the
    first-second mean velocity, so each probe takes a single integration
    step across the whole window: sub-stepping would fold the particle's
    retreat during the window into the estimate and measure something other
    than the law.  The small first-order-lag attenuation over the window is
    divided back out, so with drift off the probe returns the law exactly.
    """
    cfg = cfg if cfg is not None else default_rig()
    model = model if model is not None else make_model()
    plant_params = plant_params if plant_params is not None else PlantParams()
    spec = cfg.solenoids[solenoid]
    tip = np.array(
        [spec.tip_radius * math.cos(spec.angle), spec.tip_radius * math.sin(spec.angle)]
    )
    inward = -tip / np.hypot(tip[0], tip[1])
    pattern = ActuationPattern.from_indices([solenoid])
    window = ACTUATION_WINDOW_S
    lag_factor = 1.0
    if plant_params.lag_tau > 0:
        lag_factor = 1.0 - math.exp(-window / plant_params.lag_tau)
    rows = []
    for dist in distances:
        start = tip + dist * inward
        if np.hypot(start[0], start[1]) > cfg.workspace_radius:
            raise ValueError(f"initial distance {dist} mm puts the particle outside the workspace")
        speeds = []
        for rep in range(reps):
            params = PlantParams(
                lag_tau=plant_params.lag_tau,
                drift_rms=plant_params.drift_rms,
                drift_corr_time=plant_params.drift_corr_time,
                seed=seed + rep,
            )
            plant = Plant(
                cfg,
                model,
                params,
                state=ParticleState(position=(float(start[0]), float(start[1]))),
                current=current,
            )
            before = np.asarray(plant.state.position)
            plant.step(pattern, window)
            after = np.asarray(plant.state.position)
            moved = math.hypot(after[0] - before[0], after[1] - before[1])
            speeds.append(moved / window / lag_factor)
        arr = np.asarray(speeds)
        rows.append(
            {
                "distance_mm": dist,
                "mean_mm_s": float(arr.mean()),
                "std_mm_s": float(arr.std()),
                "speeds_mm_s": [float(s) for s in speeds],
            }
        )
    return rows


def run_batch(
    path: ReferencePath,
    reps: int,
    seed: int,
    cfg: WorkspaceConfig | None = None,
    model: VelocityModel | None = None,
    plant_params: PlantParams | None = None,
    weights: ControllerWeights | None = None,
    current: float = CALIBRATION_CURRENT_A,
    mode: MeasureMode = "oracle",
) -> list[TrajectoryLog]:
    """`reps` independent trials with consecutive seeds starting at `seed`."""
    base = plant_params if plant_params is not None else PlantParams()
    logs = []
    for rep in range(reps):
        params = PlantParams(
            lag_tau=base.lag_tau,
            drift_rms=base.drift_rms,
            drift_corr_time=base.drift_corr_time,
            seed=seed + rep,
        )
        logs.append(
            run_path_trial(
                path,
                cfg=cfg,
                model=model,
                plant_params=params,
                weights=weights,
                current=current,
                mode=mode,
            )
        )
    return logs
