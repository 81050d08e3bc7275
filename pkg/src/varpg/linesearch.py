"""Armijo backtracking with a cone-valued sufficient-decrease test.

Step ``gamma**j`` is accepted once

    F(x) - F(x + gamma**j v) + sigma * gamma**j * J_F(x) v  in  K

where ``K`` is the cone at ``x`` (or at ``F(x)`` for image-indexed orders),
always the cone of the current iterate, never of the trial point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .geometry import FeasibleSet
from .order import cone_contains, dual_generators
from .problem import VectorProblem

log = logging.getLogger(__name__)


class LineSearchError(RuntimeError):
    pass


@dataclass(frozen=True)
class ArmijoParams:
    sigma: float = 0.1
    gamma: float = 0.5
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie in (0, 1)")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if self.max_backtracks < 1:
            raise ValueError("max_backtracks must be positive")


@dataclass(frozen=True)
class ArmijoResult:
    step: float
    j: int
    trials: int
    # Trials where the scalarized test (rho(-residual) <= 0) disagreed with
    # the direct cone test; nonzero values point at an inconsistent cone.
    rho_disagreements: int = 0


def armijo_step(problem: VectorProblem, x, v, params: ArmijoParams = ArmijoParams(),
                feasible: FeasibleSet | None = None) -> ArmijoResult:
    """Smallest ``j >= 0`` passing the cone test.

    If ``feasible`` is given and nonconvex, trial points must also lie in it,
    since convexity no longer guarantees that ``x + gamma**j v`` is feasible.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    Fx = problem.F(x)
    Jv = problem.J(x) @ v
    cone = problem.cone(x)
    G = dual_generators(cone).generators
    if float(np.max(G @ Jv)) >= 0.0:
        raise LineSearchError("v is not a descent direction (phi(x, v) >= 0)")
    check_feasible = feasible is not None and not feasible.convex

    t = 1.0
    disagreements = 0
    for j in range(params.max_backtracks + 1):
        trial = x + t * v
        residual = Fx - problem.F(trial) + params.sigma * t * Jv
        ok = cone_contains(cone, residual, 0.0)
        if (float(np.max(-G @ residual)) <= 1e-12 * max(1.0, float(np.linalg.norm(residual)))) != ok:
            disagreements += 1
        if ok and (not check_feasible or feasible.contains(trial, 1e-10)):
            if disagreements:
                log.warning("rho and cone membership disagreed %d times at x=%s", disagreements, x.tolist())
            return ArmijoResult(step=t, j=j, trials=j + 1, rho_disagreements=disagreements)
        t *= params.gamma
    raise LineSearchError(f"no Armijo step within {params.max_backtracks} backtracks at x={x.tolist()}")
