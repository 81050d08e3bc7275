"""Bundled test problems and their registry.

``ex6.1``  scalar decision, polyhedral order ``K(x)`` on ``[0, 1]``;
``ex6.2``  squared coordinates on an annulus, norm-cone order ``K(F(x))``;
``ex6.3``  identity objective on a wavy crescent, norm-cone order ``K(x)``.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .geometry import Annulus, Box, Custom
from .order import ConeError, Indexing, NormCone, Polyhedral, VariableOrder
from .problem import VectorProblem

SQRT2M1 = math.sqrt(2.0) - 1.0


# -- ex6.1 ---------------------------------------------------------------------

def _ex61_cone(x: np.ndarray) -> Polyhedral:
    t = float(x[0])
    # z1 >= 0 and (t^2 + 1) z1 - (t + 1) z2 <= 0
    return Polyhedral([[1.0, 0.0], [t * t + 1.0, -(t + 1.0)]], [">=", "<="])


def example_6_1() -> VectorProblem:
    """``F(x) = (x + 1, x^2 + 1)`` on ``[0, 1]``; minimizers ``[0, sqrt(2) - 1]``."""
    # min over [0, 1] of (t^2 + 1) / (t + 1) is 2(sqrt 2 - 1), attained at sqrt 2 - 1.
    bounding = Polyhedral([[1.0, 0.0], [-2.0 * SQRT2M1, 1.0]])
    return VectorProblem(
        n=1,
        m=2,
        objective=lambda x: np.array([x[0] + 1.0, x[0] ** 2 + 1.0]),
        jac=lambda x: np.array([[1.0], [2.0 * x[0]]]),
        feasible=Box([0.0], [1.0]),
        order=VariableOrder(_ex61_cone, Indexing.DOMAIN, bounding_cone=bounding, name="ex6.1"),
        solution_checker=lambda x, tol: -tol <= float(np.atleast_1d(x)[0]) <= SQRT2M1 + tol,
        name="ex6.1",
        paper_starts=tuple(np.array([p]) for p in
                           (0.6557, 0.6948, 0.8491, 0.9340, 0.6787, 0.7577, 0.7431, 0.4387, 0.6555, 0.9502)),
        paper_solutions=tuple(np.array([p]) for p in
                              (0.4115, 0.4128, 0.4140, 0.4135, 0.4116, 0.4131, 0.4127, 0.4136, 0.4114, 0.4130)),
    )


# -- ex6.2 ---------------------------------------------------------------------

EX62_A = np.array([[2.0, 1.0], [-1.0, -1.0]])


def _ex62_cone(y: np.ndarray) -> NormCone:
    # NormCone rejects axes of norm <= 1 (cone without interior).
    return NormCone(EX62_A @ y / math.pi)


def _on_circles(x, tol: float) -> bool:
    r2 = float(np.dot(x, x))
    return abs(r2 - math.pi) <= tol or abs(r2 - 2.0 * math.pi) <= tol


def example_6_2() -> VectorProblem:
    """``F(x) = (x1^2, x2^2)`` on ``pi <= ||x||^2 <= 2 pi`` under ``K(F(x))``."""
    starts = [(1.8650, 1.6400), (1.7525, 1.6350), (2.4190, 0.0835), (1.9573, 0.2813), (0.7931, -2.0321),
              (1.2683, -1.6814), (1.8135, 0.3050), (-2.0485, 0.3229), (-0.6446, 1.9606), (-0.8561, 2.1011)]
    sols = [(1.1632, 2.2204), (0.9850, 2.3050), (1.7705, 0.0841), (1.7492, 0.2859), (0.8634, -2.3532),
            (1.4208, -2.0650), (1.7456, 0.3074), (-1.7438, 0.3172), (-0.8016, 2.3750), (-0.9535, 2.3182)]
    return VectorProblem(
        n=2,
        m=2,
        objective=lambda x: np.array([x[0] ** 2, x[1] ** 2]),
        jac=lambda x: np.diag([2.0 * x[0], 2.0 * x[1]]),
        feasible=Annulus([0.0, 0.0], math.sqrt(math.pi), math.sqrt(2.0 * math.pi)),
        order=VariableOrder(_ex62_cone, Indexing.IMAGE, name="ex6.2"),
        solution_checker=_on_circles,
        name="ex6.2",
        paper_starts=tuple(np.array(p) for p in starts),
        paper_solutions=tuple(np.array(p) for p in sols),
    )


# -- ex6.3 ---------------------------------------------------------------------

EX63_CENTER = np.array([0.5, 0.5])
EX63_RADIUS2 = 0.5
EX63_UPPER = math.pi


def _angle(x: np.ndarray) -> float:
    # arctan(x1 / x2) written as a two-argument angle; equal for x2 > 0.
    return math.atan2(x[0], x[1])


def ring_slack(x: np.ndarray) -> float:
    return float(x[0] ** 2 + x[1] ** 2 - 1.0 - 0.1 * math.cos(16.0 * _angle(x)))


def disk_slack(x: np.ndarray) -> float:
    d = x - EX63_CENTER
    return float(EX63_RADIUS2 - d @ d)


def _ex63_contains(x: np.ndarray, tol: float) -> bool:
    return (
        ring_slack(x) >= -tol
        and disk_slack(x) >= -tol
        and bool(np.all(x >= -tol))
        and bool(np.all(x <= EX63_UPPER + tol))
    )


def _ring_radius(polar: float) -> float:
    """Radius where the ray at polar angle ``polar`` (from the x1 axis) meets the wavy circle."""
    # Along the ray, atan2(x1, x2) = pi/2 - polar.
    return math.sqrt(1.0 + 0.1 * math.cos(16.0 * (math.pi / 2.0 - polar)))


def _disk_exit_radius(polar: float) -> float:
    # The disk boundary passes through the origin: r = cos(polar) + sin(polar).
    return math.cos(polar) + math.sin(polar)


def _ray_feasible(polar: float) -> bool:
    return _ring_radius(polar) * (1.0 + 1e-12) <= _disk_exit_radius(polar)


def _ex63_project(x: np.ndarray) -> np.ndarray:
    """Closest point on the disk, repaired radially into the ring constraint.

    Not an exact projection (the set is nonconvex) but always returns a
    feasible point and is the identity on feasible points.
    """
    x = np.asarray(x, dtype=float)
    if _ex63_contains(x, 0.0):
        return x.copy()
    d = x - EX63_CENTER
    r = float(np.linalg.norm(d))
    radius = math.sqrt(EX63_RADIUS2)
    y = x.copy() if r <= radius else EX63_CENTER + d * (radius / r)
    y = np.clip(y, 0.0, EX63_UPPER)
    if ring_slack(y) >= 0.0 and disk_slack(y) >= 0.0:
        return y
    polar = math.atan2(y[1], y[0]) if np.any(y) else math.pi / 4.0
    if not _ray_feasible(polar):
        # Slide the ray toward the diagonal, where it is always feasible.
        lo, hi = polar, math.pi / 4.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _ray_feasible(mid):
                hi = mid
            else:
                lo = mid
        polar = hi
    # After the disk step only the ring can be violated, so push outward.
    rad = _ring_radius(polar) * (1.0 + 1e-12)
    return np.array([rad * math.cos(polar), rad * math.sin(polar)])


def _ex63_cone(x: np.ndarray) -> NormCone:
    low = float(np.min(x))
    if low <= 0.0:
        raise ConeError(f"ex6.3 cone undefined at x={x.tolist()} (min coordinate <= 0)")
    return NormCone(2.0 * x / low)


def example_6_3() -> VectorProblem:
    """``F(x) = x`` on the crescent between a wavy circle and a disk."""
    starts = [(0.9735, 0.6608), (0.7932, 0.9050), (0.8403, 0.8664), (0.9847, 0.6228), (0.7508, 0.9326),
              (0.9786, 0.6448), (0.9790, 0.6433), (0.9679, 0.6762), (0.8082, 0.8937), (0.8965, 0.8046)]
    sols = [(0.9011, 0.5589), (0.7407, 0.7916), (0.7854, 0.7541), (0.9096, 0.5228), (0.7004, 0.8182),
            (0.9050, 0.5437), (0.9054, 0.5423), (0.8967, 0.5735), (0.7551, 0.7806), (0.7754, 0.5859)]
    feasible = Custom(_ex63_contains, _ex63_project, dim=2, convex=False, name="ex6.3 crescent")
    return VectorProblem(
        n=2,
        m=2,
        objective=lambda x: np.array([x[0], x[1]], dtype=float),
        jac=lambda x: np.eye(2),
        feasible=feasible,
        order=VariableOrder(_ex63_cone, Indexing.DOMAIN, name="ex6.3"),
        solution_checker=None,
        name="ex6.3",
        paper_starts=tuple(np.array(p) for p in starts),
        paper_solutions=tuple(np.array(p) for p in sols),
    )


# -- registry --------------------------------------------------------------------

PROBLEMS: dict[str, Callable[[], VectorProblem]] = {
    "ex6.1": example_6_1,
    "ex6.2": example_6_2,
    "ex6.3": example_6_3,
}

# Bounding boxes used to draw random feasible starts.
SAMPLING_BOXES = {
    "ex6.1": (np.array([0.0]), np.array([1.0])),
    "ex6.2": (np.full(2, -math.sqrt(2 * math.pi)), np.full(2, math.sqrt(2 * math.pi))),
    "ex6.3": (np.zeros(2), np.full(2, 0.5 + math.sqrt(0.5))),
}


def get_problem(name: str) -> VectorProblem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None


def method_for(problem: VectorProblem) -> str:
    return "fipg" if problem.indexing is Indexing.IMAGE else "ipg"


def random_starts(name: str, count: int, seed: int = 42, max_draws: int = 100_000) -> list[np.ndarray]:
    """Uniform feasible starts by rejection sampling over the set's bounding box."""
    problem = get_problem(name)
    lo, hi = SAMPLING_BOXES[name]
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_draws):
        if len(out) == count:
            break
        p = rng.uniform(lo, hi)
        if problem.feasible.contains(p, 0.0):
            if name == "ex6.3" and np.min(p) <= 0:
                continue
            out.append(p)
    if len(out) < count:
        raise RuntimeError(f"could only draw {len(out)} feasible starts for {name}")
    return out
