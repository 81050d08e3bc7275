"""Projected gradient methods for vector optimization under variable orders."""
from .driver import (BetaSequence, Constant, DirectionMode, SolverConfig, SolverTrace, Status,
                     check_stationarity, solve, solve_fipg, solve_ipg)
from .geometry import Annulus, Ball, Box, Custom, FeasibleSet, Intersection
from .linesearch import ArmijoParams, armijo_step
from .order import (GeneratorSet, Indexing, NormCone, Polyhedral, VariableOrder, cone_contains,
                    cone_strict_contains, dual_generators, estimate_generator_lipschitz, hausdorff_distance)
from .problem import VectorProblem
from .problems import example_6_1, example_6_2, example_6_3, get_problem
from .scalarization import ScalarizationContext, phi, rho, theta
from .subproblem import DirectionResult, Mode, delta_approx_direction, s_compatible_direction, solve_exact

__version__ = "0.1.0"
