"""Quantum trajectories from the stationary quantum Hamilton-Jacobi equation.

Internal units are eV, angstrom and femtosecond (see :mod:`qtraj.constants`).
"""

from ._jit import backend
from .basis import (Constant, HarmonicExcited1, HarmonicGround, Linear, Scenario,
                    TransformParams, build_basis, map_microstate, transform_basis,
                    invert_microstate_map)
from .dynamics import (IntegrationOptions, Microstate, Trajectory, integrate_trajectory,
                       velocity_field)

__version__ = "0.1.0"

__all__ = [
    "backend", "Constant", "Linear", "HarmonicGround", "HarmonicExcited1", "Scenario",
    "TransformParams", "build_basis", "transform_basis", "map_microstate",
    "invert_microstate_map", "Microstate", "IntegrationOptions", "Trajectory",
    "integrate_trajectory", "velocity_field",
]
