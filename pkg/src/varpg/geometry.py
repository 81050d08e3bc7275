"""Feasible sets with closest-point projections.

Every set exposes ``project``, ``contains`` and ``translate``. Translation by
``x`` produces the set ``C - x`` with ``P_{C-x}(u) = P_C(u + x) - x``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

log = logging.getLogger(__name__)


class ProjectionError(RuntimeError):
    """Raised when an iterative projection fails to converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


class FeasibleSet:
    """Base class. Subclasses implement ``project`` and ``contains``."""

    convex: bool = True
    dim: int

    def project(self, x) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x, tol: float = 1e-9) -> bool:
        raise NotImplementedError

    def translate(self, x) -> "FeasibleSet":
        x = _vec(x)
        self._check_dim(x)
        if not np.any(x):
            return self
        return Translated(self, x)

    def _check_dim(self, x: np.ndarray):
        if x.shape != (self.dim,):
            raise ValueError(f"expected a point of dimension {self.dim}, got shape {x.shape}")


@dataclass(frozen=True, eq=False)
class Box(FeasibleSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = _vec(self.lower), _vec(self.upper)
        if lo.shape != hi.shape:
            raise ValueError("box bounds have different shapes")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.shape[0]

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        return np.clip(x, self.lower, self.upper)

    def contains(self, x, tol=1e-9):
        x = _vec(x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def translate(self, x):
        x = _vec(x)
        self._check_dim(x)
        return Box(self.lower - x, self.upper - x)

    def __repr__(self):
        return f"Box({self.lower.tolist()}, {self.upper.tolist()})"


@dataclass(frozen=True, eq=False)
class Ball(FeasibleSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")

    @property
    def dim(self):
        return self.center.shape[0]

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        d = x - self.center
        r = float(np.linalg.norm(d))
        if r <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / r)

    def contains(self, x, tol=1e-9):
        return float(np.linalg.norm(_vec(x) - self.center)) <= self.radius + tol

    def translate(self, x):
        x = _vec(x)
        self._check_dim(x)
        return Ball(self.center - x, self.radius)


@dataclass(frozen=True, eq=False)
class Annulus(FeasibleSet):
    """``{x : r_inner <= ||x - center|| <= r_outer}``; nonconvex when ``r_inner > 0``."""

    center: np.ndarray
    r_inner: float
    r_outer: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not 0 <= self.r_inner <= self.r_outer:
            raise ValueError("annulus requires 0 <= r_inner <= r_outer")

    @property
    def convex(self):
        return self.r_inner == 0

    @property
    def dim(self):
        return self.center.shape[0]

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        d = x - self.center
        r = float(np.linalg.norm(d))
        if r == 0.0:
            # Every point of the inner sphere is closest; pick e_1 for determinism.
            e1 = np.zeros(self.dim)
            e1[0] = 1.0
            return self.center + self.r_inner * e1
        if self.r_inner <= r <= self.r_outer:
            return x.copy()
        target = min(max(r, self.r_inner), self.r_outer)
        return self.center + d * (target / r)

    def contains(self, x, tol=1e-9):
        r = float(np.linalg.norm(_vec(x) - self.center))
        return self.r_inner - tol <= r <= self.r_outer + tol

    def translate(self, x):
        x = _vec(x)
        self._check_dim(x)
        return Annulus(self.center - x, self.r_inner, self.r_outer)


@dataclass(frozen=True, eq=False)
class Intersection(FeasibleSet):
    """Intersection of convex sets, projected with Dykstra's algorithm."""

    parts: tuple
    tol: float = 1e-10
    max_iter: int = 10_000

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("intersection of zero sets")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError("intersected sets have different dimensions")
        if not all(p.convex for p in parts):
            raise ValueError("Dykstra projection requires convex parts")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        return dykstra(self.parts, x, tol=self.tol, max_iter=self.max_iter)

    def contains(self, x, tol=1e-9):
        return all(p.contains(x, tol) for p in self.parts)

    def translate(self, x):
        x = _vec(x)
        self._check_dim(x)
        return Intersection(tuple(p.translate(x) for p in self.parts), self.tol, self.max_iter)


def dykstra(parts: Sequence[FeasibleSet], x, tol: float = 1e-10, max_iter: int = 10_000) -> np.ndarray:
    """Project ``x`` onto the intersection of convex ``parts``.

    Stops when a full sweep moves the iterate by less than ``tol`` and the
    iterate lies in every part; raises :class:`ProjectionError` after
    ``max_iter`` sweeps, or earlier if the sweeps stall outside the
    intersection (empty intersection).
    """
    y = _vec(x).copy()
    increments = [np.zeros_like(y) for _ in parts]
    stalled = 0
    residual = np.inf
    for _ in range(max_iter):
        y_prev = y.copy()
        for i, part in enumerate(parts):
            z = part.project(y + increments[i])
            increments[i] = y + increments[i] - z
            y = z
        change = float(np.linalg.norm(y - y_prev))
        residual = max(float(np.linalg.norm(part.project(y) - y)) for part in parts)
        if change < tol and residual < 1e-9:
            return y
        if change < tol * 1e-3 and residual >= 1e-9:
            stalled += 1
            if stalled > 50:
                raise ProjectionError("intersection appears empty", residual)
        else:
            stalled = 0
    raise ProjectionError("Dykstra iteration did not converge", residual)


@dataclass(frozen=True, eq=False)
class Custom(FeasibleSet):
    """Set given by user oracles. Both oracles must be pure functions."""

    membership: Callable[[np.ndarray, float], bool]
    projection: Callable[[np.ndarray], np.ndarray]
    dim: int
    convex: bool = False
    name: str = field(default="custom")

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        return _vec(self.projection(x))

    def contains(self, x, tol=1e-9):
        return bool(self.membership(_vec(x), tol))


@dataclass(frozen=True, eq=False)
class Translated(FeasibleSet):
    """``base - shift``."""

    base: FeasibleSet
    shift: np.ndarray

    @property
    def dim(self):
        return self.base.dim

    @property
    def convex(self):
        return self.base.convex

    def project(self, x):
        x = _vec(x)
        self._check_dim(x)
        return self.base.project(x + self.shift) - self.shift

    def contains(self, x, tol=1e-9):
        return self.base.contains(_vec(x) + self.shift, tol)

    def translate(self, x):
        x = _vec(x)
        self._check_dim(x)
        return Translated(self.base, self.shift + x)


def project(feasible: FeasibleSet, x) -> np.ndarray:
    return feasible.project(x)


def translate(feasible: FeasibleSet, x) -> FeasibleSet:
    return feasible.translate(x)


def contains(feasible: FeasibleSet, x, tol: float = 1e-9) -> bool:
    return feasible.contains(x, tol)
