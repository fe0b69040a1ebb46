"""Gradient-based optimal control of a Landau-Zener qubit with an uncertain drift.

Plain optimal control finds fields that hit a target gate at one nominal
drift strength.  Decoupling pulses cancel the first and second order drift
errors instead, and the hybrid flow improves a decoupling pulse at the
nominal drift while keeping its decoupling constraints nearly satisfied.
"""

__version__ = "0.1.0"

from .analysis import (EnsembleStats, SweepResult, bloch_vector, ensemble_grid,
                       ensemble_state_fidelity, epsilon_sweep, robustness_R)
from .constraints import ConstraintVector, eta, grad_eta, zeta
from .controls import (ControlField, ShapeFunction, TimeGrid, fluence, initial_square_pulse,
                       inner_product, norm, rotation_angle, shape_eval, theta_profile)
from .errors import (ArtifactIOError, CriticalPointError, GridMismatchError, InvalidArgumentError,
                     LZControlError, NonConvergenceError, ParseError, UndefinedPhaseError)
from .objective import (Z_PI, Z_PI_2, GateTarget, ObjectiveConfig, fidelity, gate_distance,
                        grad_J, objective_J, parse_target)
from .optimize import OptimizerConfig, OptResult, optimize_hybrid, optimize_oct, synth_dp
from .projection import gramian, project_gradient
from .su2 import HamiltonianParams, propagate, propagate_many, su2_exp, trajectory
from .units import convert_units

__all__ = [
    "EnsembleStats",
    "SweepResult",
    "bloch_vector",
    "ensemble_grid",
    "ensemble_state_fidelity",
    "epsilon_sweep",
    "robustness_R",
    "ConstraintVector",
    "eta",
    "grad_eta",
    "zeta",
    "ControlField",
    "ShapeFunction",
    "TimeGrid",
    "fluence",
    "initial_square_pulse",
    "inner_product",
    "norm",
    "rotation_angle",
    "shape_eval",
    "theta_profile",
    "ArtifactIOError",
    "CriticalPointError",
    "GridMismatchError",
    "InvalidArgumentError",
    "LZControlError",
    "NonConvergenceError",
    "ParseError",
    "UndefinedPhaseError",
    "Z_PI",
    "Z_PI_2",
    "GateTarget",
    "ObjectiveConfig",
    "fidelity",
    "gate_distance",
    "grad_J",
    "objective_J",
    "parse_target",
    "OptimizerConfig",
    "OptResult",
    "optimize_hybrid",
    "optimize_oct",
    "synth_dp",
    "gramian",
    "project_gradient",
    "HamiltonianParams",
    "propagate",
    "propagate_many",
    "su2_exp",
    "trajectory",
    "convert_units",
]
