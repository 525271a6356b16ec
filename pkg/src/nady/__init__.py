"""Centre-of-mass and internal dynamics of neutral charged systems in
inhomogeneous magnetic fields, with an exact many-particle oracle and a
small quantum spectrum solver."""

from .core import C, M_PROTON, FullState, Particle, ReducedState, build_system, to_internal_frame, to_lab_frame
from .fields import GradientB, NoField, Superposition, UniformB, UniformE
from .integrate import IntegratorConfig, Termination, integrate
from .scenarios import ScenarioConfig, builtin_config, compare_trajectories, run_scenario

__version__ = "0.1.0"

__all__ = [
    "C",
    "M_PROTON",
    "FullState",
    "GradientB",
    "IntegratorConfig",
    "NoField",
    "Particle",
    "ReducedState",
    "ScenarioConfig",
    "Superposition",
    "Termination",
    "UniformB",
    "UniformE",
    "build_system",
    "builtin_config",
    "compare_trajectories",
    "integrate",
    "run_scenario",
    "to_internal_frame",
    "to_lab_frame",
]
