"""Frank-Wolfe (conditional gradient) toolkit.

Regions are accessed only through linear minimization oracles; objectives
through a first-order oracle. See :func:`fwkit.solver.run` for the main loop.
"""
from .apps import (CaratheodoryDecomposer, Decomposition, Hyperplane, MembershipWitness,
                   SeparationOracle, approx_caratheodory, separate)
from .core import Objective, custom, distance_squared, evaluate, finite_difference_gradient, quadratic
from .regions import (Box, DualPrices, KSparse, L1Ball, L2Ball, Simplex, box_dual_prices,
                      region_from_dict)
from .solver import FrankWolfe, RunTrace, SolverConfig, fw_gap, run, running_min_gap
from .steps import (Adaptive, AdaptiveParams, AdaptiveSimple, AnytimeSqrt, ConstantStep,
                    LineSearch, LogShift, OpenLoop, ShortStep, parse_rule, schedule_gamma)

__version__ = "0.1.0"

__all__ = [
    "Adaptive", "AdaptiveParams", "AdaptiveSimple", "AnytimeSqrt", "Box", "CaratheodoryDecomposer",
    "ConstantStep", "Decomposition", "DualPrices", "FrankWolfe", "Hyperplane", "KSparse", "L1Ball",
    "L2Ball", "LineSearch", "LogShift", "MembershipWitness", "Objective", "OpenLoop", "RunTrace",
    "SeparationOracle", "ShortStep", "Simplex", "SolverConfig", "approx_caratheodory",
    "box_dual_prices", "custom", "distance_squared", "evaluate", "finite_difference_gradient",
    "fw_gap", "parse_rule", "quadratic", "region_from_dict", "run", "running_min_gap",
    "schedule_gamma", "separate",
]
