from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import FeasibleSet
from .order import ConeRep, GeneratorSet, Indexing, VariableOrder


@dataclass(frozen=True, eq=False)
class VectorProblem:
    """``K-min F(x)`` subject to ``x in C`` under a variable order.

    ``jac`` returns the ``m x n`` Jacobian of ``objective``. When the order is
    image-indexed the cone at ``x`` is ``K(F(x))``, otherwise ``K(x)``.
    """

    n: int
    m: int
    objective: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    feasible: FeasibleSet
    order: VariableOrder
    solution_checker: Optional[Callable[[np.ndarray, float], bool]] = None
    name: str = ""
    paper_starts: tuple = field(default=(), repr=False)
    paper_solutions: tuple = field(default=(), repr=False)

    def F(self, x) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.objective(np.atleast_1d(np.asarray(x, dtype=float))), dtype=float))

    def J(self, x) -> np.ndarray:
        J = np.asarray(self.jac(np.atleast_1d(np.asarray(x, dtype=float))), dtype=float)
        return J.reshape(self.m, self.n)

    @property
    def indexing(self) -> Indexing:
        return self.order.indexing

    def index_point(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.F(x) if self.order.indexing is Indexing.IMAGE else x

    def cone(self, x) -> ConeRep:
        return self.order.cone(self.index_point(x))

    def generators(self, x) -> GeneratorSet:
        return self.order.generators(self.index_point(x))
