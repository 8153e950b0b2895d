"""Rig geometry and electrical configuration shared by plant, controller and harness.

Planar model of the eight-solenoid ring: each solenoid is reduced to the
point where its axis meets the fluid plane (the "tip projection"), plus a
class tag (short/long neck) and a dimensionless speed gain.  Distances are
millimetres, angles radians, currents amperes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path


class SolenoidClass(Enum):
    SHORT = "short"
    LONG = "long"


@dataclass(frozen=True)
class SolenoidSpec:
    """One solenoid of the ring.

    angle is the azimuth of the tip projection in the workspace plane;
    tip_radius the distance from the workspace centre to that projection.
    gain multiplies the actuation speed this solenoid imparts.
    """

    index: int
    angle: float
    tip_radius: float = 5.1
    kind: SolenoidClass = SolenoidClass.SHORT
    gain: float = 1.0
    inclination: float = math.pi / 4  # from horizontal; metadata for the planar model

    def __post_init__(self) -> None:
        if self.tip_radius <= 0:
            raise ValueError("tip_radius must be positive")
        if self.gain <= 0:
            raise ValueError("gain must be positive")


@dataclass(frozen=True)
class SupplyMap:
    """Linear current-voltage map of the drive electronics: I = slope*V + offset."""

    slope: float = 0.2325  # A/V, through (2 V, 0.47 A) and (6 V, 1.4 A)
    offset: float = 0.005  # A

    def current(self, volts: float) -> float:
        return self.slope * volts + self.offset

    def voltage(self, amps: float) -> float:
        return (amps - self.offset) / self.slope


@dataclass(frozen=True)
class FieldFalloff:
    """Power-law decay model of the on-axis field near a tip.

    b0 is the peak field (mT) at the source, d0 (mm) the core scale where
    the decay sets in; far from the source the field drops like d^-exponent.
    Only shape matters downstream; no absolute calibration is claimed.
    """

    b0: float = 100.0
    d0: float = 1.0
    exponent: float = 3.0

    def __post_init__(self) -> None:
        if self.b0 <= 0 or self.d0 <= 0 or self.exponent <= 0:
            raise ValueError("b0, d0 and exponent must all be positive")

    def field_mT(self, distance_mm: float) -> float:
        """Field magnitude in mT at in-plane distance (smooth and even in distance)."""
        return self.b0 * (1.0 + (distance_mm / self.d0) ** 2) ** (-self.exponent / 2.0)


@dataclass(frozen=True)
class WorkspaceConfig:
    """Full rig description: solenoid ring, workspace disk, drive electronics."""

    solenoids: tuple[SolenoidSpec, ...]
    workspace_radius: float = 4.0  # mm
    tick_rate: float = 30.0  # Hz
    current_ref: float = 1.43  # A, calibration current of the speed fits
    supply: SupplyMap = field(default_factory=SupplyMap)
    falloff: FieldFalloff = field(default_factory=FieldFalloff)
    tip_height: float = 0.75  # mm above the fluid; metadata only, unused by the planar model

    def __post_init__(self) -> None:
        if len(self.solenoids) != 8:
            raise ValueError("rig needs exactly 8 solenoids")
        if self.tick_rate <= 0:
            raise ValueError("tick_rate must be positive")
        if self.workspace_radius > min(s.tip_radius for s in self.solenoids):
            raise ValueError("workspace_radius must not exceed the solenoid circle")

    @property
    def tick_dt(self) -> float:
        return 1.0 / self.tick_rate


def tip_projection(spec: SolenoidSpec) -> tuple[float, float]:
    """Workspace-plane point where the solenoid axis meets the fluid (mm)."""
    return (spec.tip_radius * math.cos(spec.angle), spec.tip_radius * math.sin(spec.angle))


def default_rig() -> WorkspaceConfig:
    """Eight solenoids at 45-degree increments, classes alternating around the ring."""
    solenoids = tuple(
        SolenoidSpec(
            index=i,
            angle=i * math.pi / 4.0,
            tip_radius=5.1,
            kind=SolenoidClass.SHORT if i % 2 == 0 else SolenoidClass.LONG,
            gain=1.0,
        )
        for i in range(8)
    )
    return WorkspaceConfig(solenoids=solenoids)


def voltage_to_current(cfg: WorkspaceConfig, volts: float) -> float:
    """Coil current for a supply voltage, via the rig's linear map.

    Valid for 0..6 V (the drive electronics' operating range).
    """
    if not 0.0 <= volts <= 6.0:
        raise ValueError(f"voltage {volts} V outside the 0-6 V drive range")
    return cfg.supply.current(volts)


def rig_from_dict(data: dict) -> WorkspaceConfig:
    """Build a rig from a JSON-style override dict on top of the default rig.

    Recognised keys: solenoids[] {angle_deg, tip_radius_mm, class, gain},
    workspace_radius_mm, tick_rate_hz, current_ref_a.
    """
    base = default_rig()
    solenoids = base.solenoids
    if "solenoids" in data:
        entries = data["solenoids"]
        if len(entries) != 8:
            raise ValueError("solenoids override must list all 8 entries")
        specs = []
        for i, entry in enumerate(entries):
            ref = base.solenoids[i]
            specs.append(
                SolenoidSpec(
                    index=i,
                    angle=math.radians(entry["angle_deg"]) if "angle_deg" in entry else ref.angle,
                    tip_radius=entry.get("tip_radius_mm", ref.tip_radius),
                    kind=SolenoidClass(entry["class"].lower()) if "class" in entry else ref.kind,
                    gain=entry.get("gain", ref.gain),
                )
            )
        solenoids = tuple(specs)
    return replace(
        base,
        solenoids=solenoids,
        workspace_radius=data.get("workspace_radius_mm", base.workspace_radius),
        tick_rate=data.get("tick_rate_hz", base.tick_rate),
        current_ref=data.get("current_ref_a", base.current_ref),
    )


def load_rig(path: str | Path) -> WorkspaceConfig:
    """Load rig overrides from a JSON file."""
    with open(path) as fh:
        return rig_from_dict(json.load(fh))
