"""Outer loops of the projected gradient methods.

``solve_ipg`` handles orders indexed by the decision variable, ``solve_fipg``
orders indexed by the objective value. Both share one loop: find a direction
(exact or delta-approximate), stop when it is shorter than ``tol_stat``,
otherwise backtrack and step ``x <- x + gamma_k v``.
"""
from __future__ import annotations

import enum
import logging
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .linesearch import ArmijoParams, LineSearchError, armijo_step
from .order import Indexing, cone_contains
from .problem import VectorProblem
from .scalarization import ScalarizationContext
from .subproblem import DirectionResult, Mode, delta_approx_direction, solve_exact

log = logging.getLogger(__name__)


class DirectionMode(enum.Enum):
    EXACT = "exact"
    DELTA_APPROX = "delta"


class Status(enum.Enum):
    STATIONARY = "Stationary"
    MAX_ITER = "MaxIter"
    LINE_SEARCH_FAIL = "LineSearchFail"
    SUBPROBLEM_FAIL = "SubproblemFail"


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, k: int) -> float:
        return self.value


@dataclass(frozen=True)
class BetaSequence:
    values: tuple

    def __call__(self, k: int) -> float:
        return self.values[min(k, len(self.values) - 1)]


BetaSchedule = Union[Constant, BetaSequence]


@dataclass(frozen=True)
class SolverConfig:
    delta: float = 0.5
    armijo: ArmijoParams = ArmijoParams()
    beta_lo: float = 1e-3
    beta_hi: float = 1e3
    beta_schedule: BetaSchedule = Constant(0.25)
    tol_stat: float = 1e-4
    max_iter: int = 30
    direction_mode: DirectionMode = DirectionMode.DELTA_APPROX
    budget: int = 8
    subproblem_tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 <= self.delta < 1.0:
            raise ValueError("delta must lie in [0, 1)")
        if not 0.0 < self.beta_lo <= self.beta_hi:
            raise ValueError("need 0 < beta_lo <= beta_hi")
        if self.tol_stat <= 0 or self.max_iter < 1 or self.budget < 1:
            raise ValueError("tol_stat, max_iter and budget must be positive")
        sched = self.beta_schedule
        values = (sched.value,) if isinstance(sched, Constant) else tuple(sched.values)
        if not values:
            raise ValueError("empty beta sequence")
        clamped = tuple(min(max(b, self.beta_lo), self.beta_hi) for b in values)
        if clamped != values:
            warnings.warn("beta values clamped to [beta_lo, beta_hi]", stacklevel=2)
            sched = Constant(clamped[0]) if isinstance(sched, Constant) else BetaSequence(clamped)
            object.__setattr__(self, "beta_schedule", sched)

    def beta(self, k: int) -> float:
        return float(self.beta_schedule(k))

    @property
    def exact(self) -> bool:
        return self.direction_mode is DirectionMode.EXACT

    def with_(self, **changes) -> "SolverConfig":
        from dataclasses import replace
        return replace(self, **changes)


@dataclass
class IterationRecord:
    k: int
    x: np.ndarray
    v: np.ndarray
    v_norm: float
    phi: float
    model_value: float
    step: float
    j: int
    beta: float
    armijo_trials: int
    feasibility_residual: float
    cone_decrease_ok: bool
    mode: Mode
    bounding_decrease_ok: Optional[bool] = None


@dataclass
class SolverTrace:
    x0: np.ndarray
    records: list = field(default_factory=list)
    status: Status = Status.MAX_ITER
    x_final: Optional[np.ndarray] = None
    final_direction: Optional[DirectionResult] = None
    wall_seconds: float = 0.0
    notes: list = field(default_factory=list)
    nonconvex: bool = False

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def final_direction_norm(self) -> float:
        return self.final_direction.norm if self.final_direction is not None else float("nan")

    @property
    def iterates(self) -> list:
        return [r.x for r in self.records] + [self.x_final]


def _feasibility_residual(problem: VectorProblem, x: np.ndarray) -> float:
    return float(np.linalg.norm(problem.feasible.project(x) - x))


def _direction(ctx, x, beta, problem, config) -> DirectionResult:
    if config.exact:
        return solve_exact(ctx, x, beta, problem.feasible, tol=config.subproblem_tol)
    return delta_approx_direction(ctx, x, beta, problem.feasible, config.delta,
                                  budget=config.budget, tol=config.subproblem_tol)


def _solve(problem: VectorProblem, config: SolverConfig, x0) -> SolverTrace:
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    trace = SolverTrace(x0=x.copy(), nonconvex=not problem.feasible.convex)
    if trace.nonconvex:
        trace.notes.append("feasible set is nonconvex; projections and duality are heuristic")
    if not problem.feasible.contains(x, 1e-9):
        x = problem.feasible.project(x)
        trace.notes.append(f"x0 infeasible; projected to {x.tolist()}")
    ctx = ScalarizationContext(problem)
    bounding = problem.order.bounding_cone

    start = time.perf_counter()
    for k in range(config.max_iter + 1):
        beta = config.beta(k)
        try:
            d = _direction(ctx, x, beta, problem, config)
        except Exception as exc:  # projection failures, invalid cones
            trace.status = Status.SUBPROBLEM_FAIL
            trace.notes.append(f"direction failed at k={k}: {exc}")
            break
        trace.final_direction = d
        if d.norm < config.tol_stat:
            trace.status = Status.STATIONARY
            break
        if k == config.max_iter:
            trace.status = Status.MAX_ITER
            break
        try:
            ls = armijo_step(problem, x, d.v, config.armijo, feasible=problem.feasible)
        except LineSearchError as exc:
            trace.status = Status.LINE_SEARCH_FAIL
            trace.notes.append(str(exc))
            break
        x_new = x + ls.step * d.v
        decrease = problem.F(x) - problem.F(x_new)
        rec = IterationRecord(
            k=k, x=x, v=d.v, v_norm=d.norm, phi=d.phi_value, model_value=d.model_value,
            step=ls.step, j=ls.j, beta=beta, armijo_trials=ls.trials,
            feasibility_residual=_feasibility_residual(problem, x),
            cone_decrease_ok=cone_contains(problem.cone(x), decrease, 1e-10),
            mode=d.mode,
            bounding_decrease_ok=None if bounding is None else cone_contains(bounding, decrease, 1e-10),
        )
        trace.records.append(rec)
        x = x_new
    trace.wall_seconds = time.perf_counter() - start
    trace.x_final = x
    return trace


def solve_ipg(problem: VectorProblem, config: SolverConfig, x0) -> SolverTrace:
    """Projected gradient method for an order ``K(x)`` on the decision space."""
    if problem.indexing is not Indexing.DOMAIN:
        raise ValueError("solve_ipg needs a domain-indexed order; use solve_fipg")
    return _solve(problem, config, x0)


def solve_fipg(problem: VectorProblem, config: SolverConfig, x0) -> SolverTrace:
    """Projected gradient method for an order ``K(F(x))`` on the image space."""
    if problem.indexing is not Indexing.IMAGE:
        raise ValueError("solve_fipg needs an image-indexed order; use solve_ipg")
    return _solve(problem, config, x0)


def solve(problem: VectorProblem, config: SolverConfig, x0) -> SolverTrace:
    """Dispatch on the problem's order indexing."""
    return _solve(problem, config, x0)


def check_stationarity(problem: VectorProblem, x, beta: float = 1.0, tol_stat: float = 1e-4
                       ) -> tuple[float, bool]:
    """``theta_beta(x)`` and whether the exact direction is shorter than ``tol_stat``."""
    d = solve_exact(ScalarizationContext(problem), x, beta, problem.feasible)
    return d.model_value, d.norm < tol_stat
