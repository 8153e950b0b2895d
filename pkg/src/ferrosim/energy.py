"""Axisymmetric energy of a floating particle near a surface bump.

The energised solenoid raises a bump on the liquid surface; a non-magnetic
particle's total energy combines a constant adsorption term, the
gravito-capillary cost of sitting on the deformed surface, and the magnetic
energy of the displaced liquid versus the particle itself.  The radial
force is the negative slope of that energy.  This module validates
structure (signs, gradients, limiting cases), not absolute magnitudes: the
bump profile is a parameterised Gaussian, not a solved equilibrium shape.

Units: SI (m, kg, s, T, J).  The in-plane field map converts the rig's
mm/mT falloff description.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .workspace import FieldFalloff

MU_0 = 4.0e-7 * math.pi  # T*m/A
GRAVITY = 9.81  # m/s^2


@dataclass(frozen=True)
class FluidProperties:
    """Bulk properties of the carrier liquid (defaults: the water-based ferrofluid)."""

    surface_tension: float = 0.07475  # N/m
    density: float = 1071.0  # kg/m^3
    viscosity: float = 0.9e-3  # Pa*s; metadata, unused by the statics below
    susceptibility: float = 0.2  # SI volume susceptibility of the liquid
    mu0: float = MU_0

    def __post_init__(self) -> None:
        if self.surface_tension <= 0:
            raise ValueError("surface_tension must be positive")
        if self.density <= 0:
            raise ValueError("density must be positive")
        if self.susceptibility < 0:
            raise ValueError("liquid susceptibility must be non-negative")


def _sphere_volume(diameter_m: float) -> float:
    return math.pi * diameter_m**3 / 6.0


@dataclass(frozen=True)
class ParticleProperties:
    """Floating-particle terms: volumes, susceptibility, buoyancy-corrected mass.

    Defaults describe the 550 um polyethylene sphere, half immersed.
    effective_mass may be negative for a strongly buoyant particle.
    """

    volume: float = _sphere_volume(550e-6)  # m^3
    immersed_volume: float = _sphere_volume(550e-6) / 2.0  # m^3 of displaced liquid
    susceptibility: float = 0.0
    effective_mass: float = 960.0 * _sphere_volume(550e-6) - 1071.0 * _sphere_volume(550e-6) / 2.0
    adsorption_energy: float = 0.0  # J, constant offset

    def __post_init__(self) -> None:
        if self.volume <= 0:
            raise ValueError("particle volume must be positive")
        if not 0 <= self.immersed_volume <= self.volume:
            raise ValueError("immersed volume must stay within the particle volume")


@dataclass(frozen=True)
class DeformationField:
    """Gaussian bump u(rho) = height * exp(-rho^2 / (2 width^2)), metres."""

    height: float = 2e-4  # m, positive upward; hundreds of micrometres in practice
    width: float = 1e-3  # m

    def __post_init__(self) -> None:
        if self.width <= 0:
            raise ValueError("bump width must be positive")

    def u(self, rho: float) -> float:
        return self.height * math.exp(-(rho * rho) / (2.0 * self.width**2))

    def du(self, rho: float) -> float:
        return -rho / self.width**2 * self.u(rho)

    def d2u(self, rho: float) -> float:
        w2 = self.width**2
        return (rho * rho / w2 - 1.0) / w2 * self.u(rho)


@dataclass(frozen=True)
class EnergyParams:
    """Everything needed to evaluate the energy along the radial coordinate."""

    fluid: FluidProperties = field(default_factory=FluidProperties)
    particle: ParticleProperties = field(default_factory=ParticleProperties)
    deformation: DeformationField = field(default_factory=DeformationField)
    falloff: FieldFalloff = field(default_factory=FieldFalloff)
    gravity: float = GRAVITY
    capillary_len: float | None = None  # m; derived from the fluid when None

    def capillary(self) -> float:
        if self.capillary_len is not None:
            return self.capillary_len
        return capillary_length(self.fluid, self.gravity)


def capillary_length(fluid: FluidProperties, gravity: float = GRAVITY) -> float:
    """sqrt(surface_tension / (density * g)), the gravity-capillarity length scale."""
    if fluid.surface_tension <= 0 or fluid.density <= 0:
        raise ValueError("capillary length needs positive surface tension and density")
    return math.sqrt(fluid.surface_tension / (fluid.density * gravity))


def mean_curvature(deformation: DeformationField, rho: float) -> float:
    """Small-slope axisymmetric mean curvature H = (u'' + u'/rho) / 2.

    At rho = 0 both terms equal u''(0), so H(0) = u''(0).
    """
    if rho < 0:
        raise ValueError("rho must be non-negative")
    if rho == 0.0:
        return deformation.d2u(0.0)
    return 0.5 * (deformation.d2u(rho) + deformation.du(rho) / rho)


def planar_field(falloff: FieldFalloff, rho_m: float) -> float:
    """Field magnitude (T) at in-plane distance rho (m) from the source."""
    return falloff.field_mT(abs(rho_m) * 1e3) * 1e-3


def total_energy(params: EnergyParams, rho: float) -> float:
    """Total energy (J) at in-plane distance rho (m) from the source axis."""
    if rho < 0:
        raise ValueError("rho must be non-negative")
    fluid, part, bump = params.fluid, params.particle, params.deformation
    l = params.capillary()
    gravito_capillary = part.effective_mass * params.gravity * (
        bump.u(rho) + l * l * mean_curvature(bump, rho)
    )
    b = planar_field(params.falloff, rho)
    magnetic = (
        (fluid.susceptibility * part.immersed_volume - part.susceptibility * part.volume)
        * b
        * b
        / fluid.mu0
    )
    return part.adsorption_energy + gravito_capillary - magnetic


def _energy_even(params: EnergyParams, rho: float) -> float:
    # Even extension: every term is even in rho, so E(-x) = E(x).
    return total_energy(params, abs(rho))


def radial_force(params: EnergyParams, rho: float, step: float | None = None) -> float:
    """Radial force F = -dE/drho (N), by Richardson-extrapolated central difference.

    The default step adapts to the bump width.  The evaluation uses the even
    extension of E, so F(0) = 0 exactly by axisymmetry.
    """
    if rho < 0:
        raise ValueError("rho must be non-negative")
    h = params.deformation.width / 1000.0 if step is None else step
    def diff(d: float) -> float:
        return (_energy_even(params, rho + d) - _energy_even(params, rho - d)) / (2.0 * d)
    # One Richardson step cancels the O(h^2) error of the central difference.
    return -(4.0 * diff(h / 2.0) - diff(h)) / 3.0


def energy_sweep(
    params: EnergyParams, rho_max: float, steps: int = 200
) -> list[dict[str, float]]:
    """Sampled profile rows (rho_m, u_m, H_per_m, B_T, E_J, F_N) on [0, rho_max]."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    rows = []
    for i in range(steps):
        rho = rho_max * i / (steps - 1)
        rows.append(
            {
                "rho_m": rho,
                "u_m": params.deformation.u(rho),
                "H_per_m": mean_curvature(params.deformation, rho),
                "B_T": planar_field(params.falloff, rho),
                "E_J": total_energy(params, rho),
                "F_N": radial_force(params, rho),
            }
        )
    return rows
