"""Limit-cycle formation control around a static or moving target.

Simulates N double-integrator agents converging onto a prescribed
distribution pattern (per-agent radii and neighbor gaps, common angular
velocity) and verifies the controller's spectral, equilibrium, and
stability properties numerically.
"""

from ._backend import DEFAULT_BACKEND, HAVE_COMPILED, available_backends
from .controller import (
    ControllerParams,
    RelativeObservation,
    angular_distance,
    angular_rate,
    control_input,
    control_input_local,
    radial_gain,
    rotation_gain,
    spacing_feedback,
)
from .formation import (
    FormationSpec,
    RingTopology,
    assign_labels,
    equal_spacing,
    validate,
)
from .geometry import (
    Vec2,
    circular_distance,
    rotate,
    rotate_into_frame,
    to_polar,
    wrap_angle,
)
from .simulate import (
    AgentState,
    ExplicitInit,
    InvalidConfig,
    MetricSeries,
    RandomAnnulusInit,
    SimConfig,
    SimulationDiverged,
    Trajectory,
    closed_loop_derivative,
    integrate,
    metrics,
    observe,
)
from .targets import TargetModel, TargetState

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "ControllerParams",
    "DEFAULT_BACKEND",
    "ExplicitInit",
    "FormationSpec",
    "HAVE_COMPILED",
    "InvalidConfig",
    "MetricSeries",
    "RandomAnnulusInit",
    "RelativeObservation",
    "RingTopology",
    "SimConfig",
    "SimulationDiverged",
    "TargetModel",
    "TargetState",
    "Trajectory",
    "Vec2",
    "angular_distance",
    "angular_rate",
    "assign_labels",
    "available_backends",
    "circular_distance",
    "closed_loop_derivative",
    "control_input",
    "control_input_local",
    "equal_spacing",
    "integrate",
    "metrics",
    "observe",
    "radial_gain",
    "rotate",
    "rotate_into_frame",
    "rotation_gain",
    "spacing_feedback",
    "to_polar",
    "validate",
    "wrap_angle",
]
