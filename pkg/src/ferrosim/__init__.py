"""Desk-scale workbench for steering floating particles with a solenoid ring.

Simulates non-magnetic particles on a deformable magnetic-liquid surface,
pushed by eight ON/OFF solenoids, and closes the loop with a
linear-programming visual-servoing controller.
"""

from .energy import (
    DeformationField,
    EnergyParams,
    FluidProperties,
    ParticleProperties,
    capillary_length,
    mean_curvature,
    radial_force,
    total_energy,
)
from .harness import (
    PathStats,
    TrajectoryLog,
    open_loop_sweep,
    path_errors,
    run_hold_trial,
    run_path_trial,
    velocity_stats,
)
from .paths import PathKind, ReferencePath, make_path, preset_path
from .pattern import ActuationPattern
from .plant import (
    CALIBRATION_CURRENT_A,
    ParticleState,
    Plant,
    PlantParams,
    VelocityModel,
    actuation_speed,
    make_model,
    superposed_velocity,
)
from .servo import (
    ControllerWeights,
    PathFollower,
    ServoScene,
    exhaustive_pattern,
    expected_velocities,
    make_scene,
    project,
    solve_pattern,
)
from .session import ControlSession, StateEvent
from .vision import CameraModel, GrayFrame, blob_centroid, otsu_threshold, render_frame
from .workspace import (
    FieldFalloff,
    SolenoidClass,
    SolenoidSpec,
    WorkspaceConfig,
    default_rig,
    load_rig,
    rig_from_dict,
    tip_projection,
    voltage_to_current,
)

__all__ = [name for name in dir() if not name.startswith("_")]
