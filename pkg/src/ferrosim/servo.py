"""Per-tick solenoid selection that steers the particle towards a target.

Every tick the controller predicts the velocity each solenoid would impart
at the particle's position, decomposes each prediction into components
along and across the particle-to-target direction, and scores solenoid i
with

    c_i = alpha * v_along_i - beta * |v_cross_i| - gamma / dist(P, T)^2.

The ON/OFF pattern maximising the summed score of the energised solenoids
is wanted; because the objective is linear and separable the maximiser is
simply "energise every solenoid with a positive score", which is what
solve_pattern does.  exhaustive_pattern checks the same objective over all
256 patterns and exists as the independent verifier.

Path following chases a carrot point that advances monotonically along a
sampled reference path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pattern import ActuationPattern
from .plant import CALIBRATION_CURRENT_A, VelocityModel, push_velocities
from .workspace import WorkspaceConfig, tip_projection


@dataclass(frozen=True)
class ControllerWeights:
    """Tuning of the selection score and of the path-following geometry.

    alpha rewards motion towards the target, beta penalises lateral motion,
    gamma (mm^2) thins the ON set as the target nears.  Inside `deadband`
    of the target everything switches OFF.  The carrot point sits up to
    `lookahead` ahead of the particle's progress along the path, shortened
    so the chord to it never cuts a curve or corner by more than
    `corridor`.
    """

    alpha: float = 0.4145
    beta: float = 0.2685
    gamma: float = 0.0001
    deadband: float = 0.05  # mm
    lookahead: float = 0.5  # mm
    corridor: float = 0.005  # mm

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.gamma < 0:
            raise ValueError("alpha, beta and gamma must be non-negative")
        if self.deadband <= 0 or self.lookahead <= 0:
            raise ValueError("deadband and lookahead must be positive")
        if self.corridor <= 0:
            raise ValueError("corridor must be positive")


@dataclass(frozen=True)
class ServoScene:
    """Controller inputs for one tick: positions plus per-solenoid predictions."""

    particle: np.ndarray  # (2,) mm
    target: np.ndarray  # (2,) mm
    velocities: np.ndarray  # (8, 2) mm/s


def expected_velocities(
    particle: np.ndarray,
    cfg: WorkspaceConfig,
    model: VelocityModel,
    current: float = CALIBRATION_CURRENT_A,
) -> np.ndarray:
    """(8, 2) predicted push velocities at the particle position."""
    p = np.asarray(particle, dtype=float)
    if math.hypot(p[0], p[1]) > cfg.workspace_radius:
        raise ValueError("particle outside the workspace disk")
    for spec in cfg.solenoids:
        tip = tip_projection(spec)
        if math.hypot(p[0] - tip[0], p[1] - tip[1]) < 1e-12:
            raise ValueError(f"particle coincides with solenoid {spec.index} tip projection")
    return push_velocities(p, cfg, model, current)


def make_scene(
    particle: np.ndarray,
    target: np.ndarray,
    cfg: WorkspaceConfig,
    model: VelocityModel,
    current: float = CALIBRATION_CURRENT_A,
) -> ServoScene:
    return ServoScene(
        particle=np.asarray(particle, dtype=float),
        target=np.asarray(target, dtype=float),
        velocities=expected_velocities(particle, cfg, model, current),
    )


def project(vm: np.ndarray, particle: np.ndarray, target: np.ndarray) -> tuple[float, float]:
    """Components of vm along and across the particle-to-target direction.

    The cross component is taken along the +90 degree rotation of the
    target direction, so (along, cross) is an orthonormal decomposition.
    """
    pt = np.asarray(target, dtype=float) - np.asarray(particle, dtype=float)
    dist = math.hypot(pt[0], pt[1])
    if dist == 0.0:
        raise ValueError("particle and target coincide")
    u = pt / dist
    v_along = float(vm[0] * u[0] + vm[1] * u[1])
    v_cross = float(vm[0] * -u[1] + vm[1] * u[0])
    return v_along, v_cross


def pattern_coefficients(scene: ServoScene, w: ControllerWeights) -> np.ndarray:
    """Per-solenoid scores c_i; solve_pattern energises the positive ones."""
    pt = scene.target - scene.particle
    dist = math.hypot(pt[0], pt[1])
    if dist == 0.0:
        raise ValueError("particle and target coincide")
    u = pt / dist
    v_along = scene.velocities @ u
    v_cross = scene.velocities @ np.array([-u[1], u[0]])
    return w.alpha * v_along - w.beta * np.abs(v_cross) - w.gamma / (dist * dist)


def solve_pattern(scene: ServoScene, w: ControllerWeights) -> ActuationPattern:
    """Best pattern by the separable threshold rule; all-OFF inside the deadband.

    A solenoid is ON iff its score is strictly positive (a zero score
    contributes nothing, so it stays OFF to conserve actuation).
    """
    pt = scene.target - scene.particle
    if math.hypot(pt[0], pt[1]) <= w.deadband:
        return ActuationPattern.all_off()
    c = pattern_coefficients(scene, w)
    return ActuationPattern(bits=tuple(bool(ci > 0.0) for ci in c))


_ALL_PATTERNS = np.array(
    [[code >> i & 1 for i in range(8)] for code in range(256)], dtype=float
)
_ON_COUNTS = _ALL_PATTERNS.sum(axis=1).astype(int)


def exhaustive_pattern(scene: ServoScene, w: ControllerWeights) -> ActuationPattern:
    """Independent verifier: score all 256 patterns, return the maximiser.

    Ties break towards fewer ON solenoids, then the lowest integer code.
    """
    pt = scene.target - scene.particle
    if math.hypot(pt[0], pt[1]) <= w.deadband:
        return ActuationPattern.all_off()
    scores = _ALL_PATTERNS @ pattern_coefficients(scene, w)
    best = scores.max()
    candidates = np.flatnonzero(scores == best)
    counts = _ON_COUNTS[candidates]
    candidates = candidates[counts == counts.min()]
    return ActuationPattern.from_int(int(candidates.min()))


class PathFollower:
    """Monotone carrot-point advancement along a sampled reference path.

    Keeps the index of the sample nearest the particle (never decreasing)
    and targets the farthest sample within `lookahead` arc length of it,
    subject to a chord-corridor constraint: the path samples being skipped
    must stay within `corridor` of the straight run from the particle to
    the carrot.  The corridor shortens the carrot through corners and
    curves (so they are rounded tightly instead of cut) and pulls the
    particle back when it strays.  Mid-path the carrot is always pushed
    beyond the controller deadband so following can never stall; the
    deadband takes effect only at the final sample, which is where arrival
    and holding are decided.
    """

    def __init__(self, samples: np.ndarray, weights: ControllerWeights) -> None:
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 2 or len(samples) == 0:
            raise ValueError("path samples must be a non-empty (N, 2) array")
        self.samples = samples
        self.weights = weights
        seg = np.diff(samples, axis=0)
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        self._arc = np.concatenate(([0.0], np.cumsum(seg_len)))
        spacing = float(seg_len.mean()) if len(seg_len) else weights.deadband
        self._window = max(40, math.ceil(2.0 * weights.lookahead / max(spacing, 1e-9)))
        self._index = 0
        self._carrot_index = min(1, len(samples) - 1)

    def _corridor_ok(self, p: np.ndarray, j: int) -> bool:
        """True if samples index.._j-1 stay within corridor of the chord p -> sample_j."""
        mids = self.samples[self._index : j]
        chord = self.samples[j] - p
        norm_sq = chord @ chord
        if norm_sq < 1e-24:
            return True
        rel = mids - p
        t = np.clip((rel @ chord) / norm_sq, 0.0, 1.0)
        foot = rel - t[:, None] * chord
        return float(np.einsum("ij,ij->i", foot, foot).max()) <= self.weights.corridor**2

    @property
    def index(self) -> int:
        """Index of the nearest-passed sample; never decreases."""
        return self._index

    @property
    def carrot_index(self) -> int:
        """Index of the sample the last advance() returned."""
        return self._carrot_index

    @property
    def carrot_is_final(self) -> bool:
        return self._carrot_index >= len(self.samples) - 1

    @property
    def at_final(self) -> bool:
        return self._index >= len(self.samples) - 1

    @property
    def final(self) -> np.ndarray:
        return self.samples[-1]

    def advance(self, particle: np.ndarray) -> np.ndarray:
        """Update progress from the particle position and return the carrot point."""
        p = np.asarray(particle, dtype=float)
        n = len(self.samples)
        stop = min(self._index + self._window, n)
        window = self.samples[self._index : stop] - p
        nearest = self._index + int(np.argmin(np.hypot(window[:, 0], window[:, 1])))
        self._index = max(self._index, nearest)
        if self._index >= n - 1:
            self._carrot_index = n - 1
            return self.samples[-1]
        j = self._index + 1
        while (
            j + 1 < n
            and self._arc[j + 1] - self._arc[self._index] <= self.weights.lookahead
            and self._corridor_ok(p, j + 1)
        ):
            j += 1
        # progress guard: a mid-path carrot must sit beyond the deadband
        while j < n - 1 and math.hypot(*(self.samples[j] - p)) <= self.weights.deadband:
            j += 1
        self._carrot_index = j
        return self.samples[j]
