"""Support function ``rho``, directional scalarization ``phi`` and merit ``theta``.

``rho(x, w) = max_{y in G} y^T w`` and ``phi(x, v) = rho(x, J_F(x) v)``, where
``G`` is the generator set of the dual cone at the order's index point.
``phi(x, v) < 0`` exactly when ``J_F(x) v`` lies in ``-int K``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .order import GeneratorSet
from .problem import VectorProblem

# theta above this value means the direction solver returned a bad point.
THETA_TOL = 1e-10


class ScalarizationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ScalarizationContext:
    problem: VectorProblem

    @property
    def order(self):
        return self.problem.order

    def generator_set(self, x) -> GeneratorSet:
        return self.problem.generators(x)

    def at(self, x) -> "LocalModel":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        G = self.generator_set(x).generators
        J = self.problem.J(x)
        return LocalModel(x=x, jac=J, gens=G, directional=G @ J)


@dataclass(frozen=True, eq=False)
class LocalModel:
    """Everything ``phi`` needs at a fixed point ``x``.

    ``directional`` holds the rows ``y_i^T J_F(x)``, so that
    ``phi(x, v) = max(directional @ v)``.
    """

    x: np.ndarray
    jac: np.ndarray
    gens: np.ndarray
    directional: np.ndarray

    def phi(self, v) -> tuple[float, int]:
        vals = self.directional @ np.atleast_1d(v)
        i = int(np.argmax(vals))  # first maximizer on ties
        return float(vals[i]), i

    def model(self, v, beta: float) -> float:
        v = np.atleast_1d(v)
        return 0.5 * float(v @ v) + beta * self.phi(v)[0]


def _context(ctx) -> ScalarizationContext:
    return ctx if isinstance(ctx, ScalarizationContext) else ScalarizationContext(ctx)


def rho(ctx, x, w) -> float:
    G = _context(ctx).generator_set(x).generators
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.shape != (G.shape[1],):
        raise ValueError(f"w must have length {G.shape[1]}")
    return float(np.max(G @ w))


def rho_argmax(ctx, x, w) -> int:
    G = _context(ctx).generator_set(x).generators
    return int(np.argmax(G @ np.atleast_1d(np.asarray(w, dtype=float))))


def phi(ctx, x, v) -> tuple[float, int]:
    """``phi(x, v)`` and the index of a maximizing generator."""
    ctx = _context(ctx)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != (ctx.problem.n,):
        raise ValueError(f"v must have length {ctx.problem.n}")
    return ctx.at(x).phi(v)


def theta(ctx, x, beta: float, v_exact) -> float:
    """Merit value ``||v||^2/2 + beta * phi(x, v)`` at the exact direction.

    It is nonpositive on the feasible set; a positive value means ``v_exact``
    did not come from an exact subproblem solve.
    """
    v = np.atleast_1d(np.asarray(v_exact, dtype=float))
    value = _context(ctx).at(x).model(v, beta)
    if value > THETA_TOL:
        raise ScalarizationError(f"theta = {value:.3e} > 0; v is not an exact subproblem solution")
    return value
