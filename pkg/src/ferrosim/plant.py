"""Planar particle motion on the deformable liquid surface.

The plant integrates the empirically fitted actuation-speed laws: an
energised solenoid pushes a floating particle radially away from its tip
projection with speed that falls off with distance and scales linearly in
coil current.  Contributions of simultaneously energised solenoids add as
vectors.  On top of the deterministic push the plant models a first-order
actuation lag and an exponentially correlated drift velocity.

Units: mm, s, A throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .pattern import ActuationPattern
from .workspace import SolenoidClass, SolenoidSpec, WorkspaceConfig, tip_projection

CALIBRATION_CURRENT_A = 1.43

_LAWS = ("inverse", "linear", "inverse_square")

# Fitted distance-law coefficients at the calibration current.
LAW_COEFFICIENTS = {
    "inverse": (3.17, 0.03),  # speed = a/rho + b
    "linear": (-0.16, 1.54),  # speed = a*rho + b
    "inverse_square": (6.02, 0.40),  # speed = a/rho^2 + b
}

GAIN_PRESETS: Mapping[str, Mapping[SolenoidClass, float]] = MappingProxyType(
    {
        "unit": MappingProxyType({SolenoidClass.SHORT: 1.0, SolenoidClass.LONG: 1.0}),
        # Per-class gains calibrated against the measured centre speeds of a
        # single short (0.50 mm/s) and single long (0.36 mm/s) solenoid.
        "fig2d": MappingProxyType({SolenoidClass.SHORT: 0.767, SolenoidClass.LONG: 0.552}),
    }
)


@dataclass(frozen=True)
class VelocityModel:
    """Fitted speed model: distance law scaled by current and solenoid class.

    law selects the distance dependence ("inverse" is the canonical fit,
    "linear" and "inverse_square" are the alternate fits); a and b are its
    coefficients.  current_slope/current_offset describe the linear
    speed-vs-current fit; speeds are normalised so the distance law holds
    exactly at the calibration current.
    """

    law: str = "inverse"
    a: float = 3.17
    b: float = 0.03
    current_slope: float = 0.66
    current_offset: float = -0.05
    class_gain: Mapping[SolenoidClass, float] = field(
        default_factory=lambda: GAIN_PRESETS["unit"]
    )

    def __post_init__(self) -> None:
        if self.law not in _LAWS:
            raise ValueError(f"unknown law {self.law!r}")
        decreasing = self.a < 0 if self.law == "linear" else self.a > 0
        if not decreasing:
            raise ValueError("distance law must be strictly decreasing in distance")
        if any(g <= 0 for g in self.class_gain.values()):
            raise ValueError("class gains must be positive")

    def distance_speed(self, rho: float) -> float:
        """Speed (mm/s) of the calibration fit at distance rho, before scaling."""
        if self.law == "inverse":
            return self.a / rho + self.b
        if self.law == "inverse_square":
            return self.a / rho**2 + self.b
        return self.a * rho + self.b


def make_model(preset: str = "unit", law: str = "inverse") -> VelocityModel:
    """Velocity model with one of the named gain presets and distance laws."""
    a, b = LAW_COEFFICIENTS[law]
    return VelocityModel(law=law, a=a, b=b, class_gain=GAIN_PRESETS[preset])


def preset_name(model: VelocityModel) -> str:
    """Name of the gain preset the model carries, or 'custom'."""
    for name, gains in GAIN_PRESETS.items():
        if dict(model.class_gain) == dict(gains):
            return name
    return "custom"


def current_scale(
    model: VelocityModel, current: float, current_ref: float = CALIBRATION_CURRENT_A
) -> float:
    """Multiplier on the distance law for a drive current, 1 at the reference.

    Negative extrapolations of the linear fit clamp to zero (a solenoid
    cannot pull the particle in by being weakly driven).
    """
    if current < 0:
        raise ValueError("current must be non-negative")
    denom = model.current_slope * current_ref + model.current_offset
    if denom <= 0:
        raise ValueError("current fit is non-positive at the reference current")
    return max(0.0, (model.current_slope * current + model.current_offset) / denom)


MIN_LAW_DISTANCE_MM = 0.1  # below this the speed law is held at its 0.1 mm value


def actuation_speed(
    model: VelocityModel,
    rho: float,
    kind: SolenoidClass,
    current: float = CALIBRATION_CURRENT_A,
    current_ref: float = CALIBRATION_CURRENT_A,
) -> float:
    """Push speed (mm/s) a single energised solenoid imparts at distance rho (mm)."""
    if rho <= 0:
        raise ValueError("distance must be positive")
    rho = max(rho, MIN_LAW_DISTANCE_MM)
    speed = model.distance_speed(rho)
    return model.class_gain[kind] * current_scale(model, current, current_ref) * max(0.0, speed)


def push_velocities(
    position: np.ndarray,
    cfg: WorkspaceConfig,
    model: VelocityModel,
    current: float,
) -> np.ndarray:
    """(8, 2) array: velocity each solenoid would impart at `position` if ON.

    Each row points from the solenoid's tip projection towards the particle
    (repulsion) with magnitude from the speed law.
    """
    position = np.asarray(position, dtype=float)
    out = np.empty((8, 2))
    for spec in cfg.solenoids:
        mp = position - np.asarray(tip_projection(spec))
        dist = math.hypot(mp[0], mp[1])
        speed = actuation_speed(model, dist, spec.kind, current, cfg.current_ref)
        out[spec.index] = speed / dist * mp
    return out


def superposed_velocity(
    state: "ParticleState",
    pattern: ActuationPattern,
    cfg: WorkspaceConfig,
    model: VelocityModel,
    current: float = CALIBRATION_CURRENT_A,
) -> np.ndarray:
    """Vector sum (mm/s) of the pushes from every ON solenoid."""
    if pattern.on_count == 0:
        return np.zeros(2)
    velocities = push_velocities(np.asarray(state.position), cfg, model, current)
    mask = np.fromiter(pattern.bits, dtype=bool, count=8)
    return velocities[mask].sum(axis=0)


@dataclass(frozen=True)
class ParticleState:
    """Particle pose at one instant: position/velocity (mm, mm/s), size and label."""

    position: tuple[float, float] = (0.0, 0.0)
    velocity: tuple[float, float] = (0.0, 0.0)
    diameter: float = 0.55  # the workhorse polyethylene sphere
    label: str = "PE"


@dataclass(frozen=True)
class PlantParams:
    """Disturbance and response parameters of the simulated plant."""

    lag_tau: float = 0.1  # s, first-order actuation lag
    drift_rms: float = 0.05  # mm/s, stationary RMS of the drift speed
    drift_corr_time: float = 2.0  # s
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lag_tau < 0 or self.drift_rms < 0 or self.drift_corr_time < 0:
            raise ValueError("lag_tau, drift_rms and drift_corr_time must be non-negative")


class Plant:
    """Stepped simulation of one particle; owns its RNG and disturbance state.

    One instance is advanced by a single caller; independent instances may
    run concurrently.
    """

    def __init__(
        self,
        cfg: WorkspaceConfig,
        model: VelocityModel,
        params: PlantParams,
        state: ParticleState | None = None,
        current: float = CALIBRATION_CURRENT_A,
        rng: np.random.Generator | None = None,
    ) -> None:
        self.cfg = cfg
        self.model = model
        self.params = params
        self.current = current
        self.state = state if state is not None else ParticleState()
        self._v_act = np.asarray(self.state.velocity, dtype=float).copy()
        self._drift = np.zeros(2)
        self._rng = rng if rng is not None else np.random.default_rng(params.seed)

    def reset(self, state: ParticleState) -> None:
        """Re-place the particle; disturbance state restarts from rest."""
        self.state = state
        self._v_act = np.asarray(state.velocity, dtype=float).copy()
        self._drift = np.zeros(2)

    def commanded_velocity(self, pattern: ActuationPattern) -> np.ndarray:
        return superposed_velocity(self.state, pattern, self.cfg, self.model, self.current)

    def step(self, pattern: ActuationPattern, dt: float) -> ParticleState:
        """Advance one explicit-Euler step of length dt under `pattern`.

        The realised actuation velocity relaxes towards the commanded one
        with time constant lag_tau; the drift velocity follows an
        exponentially correlated (Ornstein-Uhlenbeck) process with the
        configured correlation time and stationary RMS.
        """
        if dt <= 0:
            raise ValueError("dt must be positive")
        p = self.params
        v_cmd = self.commanded_velocity(pattern)
        if p.lag_tau > 0:
            decay = math.exp(-dt / p.lag_tau)
            self._v_act = v_cmd + (self._v_act - v_cmd) * decay
        else:
            self._v_act = v_cmd
        if p.drift_rms > 0:
            sigma = p.drift_rms / math.sqrt(2.0)  # per-component; vector RMS = drift_rms
            if p.drift_corr_time > 0:
                a = math.exp(-dt / p.drift_corr_time)
                kick = sigma * math.sqrt(1.0 - a * a)
                self._drift = a * self._drift + kick * self._rng.standard_normal(2)
            else:
                self._drift = sigma * self._rng.standard_normal(2)
        velocity = self._v_act + self._drift
        pos = np.asarray(self.state.position) + dt * velocity
        norm = math.hypot(pos[0], pos[1])
        if norm > self.cfg.workspace_radius:
            pos *= self.cfg.workspace_radius / norm
        self.state = ParticleState(
            position=(float(pos[0]), float(pos[1])),
            velocity=(float(velocity[0]), float(velocity[1])),
            diameter=self.state.diameter,
            label=self.state.label,
        )
        return self.state
