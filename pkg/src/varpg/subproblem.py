"""Direction finding: ``min_{v in C - x} ||v||^2/2 + beta * phi(x, v)``.

The exact solver works on the concave dual. For simplex weights ``w`` over the
generators put ``b(w) = beta * J_F(x)^T sum_i w_i y_i``; the inner minimum is
attained at ``v_w = P_{C-x}(-b(w))`` and

    g(w) = ||v_w||^2 / 2 + b(w)^T v_w

is concave in ``w``. Maximizing ``g`` over the simplex (golden section when
there are two generators, projected gradient ascent otherwise) and reading off
``v_w`` at the maximizer gives the unique primal solution for convex ``C``.

Inexact directions are projections ``v_w`` for trial weights ``w``
(s-compatible directions), accepted once they pass the sufficiency test

    beta * phi(x, v) <= (1 - delta) * beta * <w_bar, J_F(x) v> - delta/2 ||v||^2.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .geometry import FeasibleSet
from .scalarization import LocalModel, ScalarizationContext, _context

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...
# Directions shorter than this are treated as exactly zero.
ZERO_TOL = 1e-9
SIMPLEX_TOL = 1e-12


class Mode(enum.Enum):
    EXACT = "exact"
    DELTA_APPROX = "delta"
    ZERO = "zero"


@dataclass
class DirectionResult:
    v: np.ndarray
    phi_value: float
    model_value: float
    mode: Mode
    delta: Optional[float] = None
    weight: Optional[np.ndarray] = None
    dual_iterations: int = 0
    dual_value: Optional[float] = None
    candidates_tried: int = 0
    warnings: list = field(default_factory=list)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.v))


class _Dual:
    """The dual function ``g`` at a fixed point, with its projections cached per weight."""

    def __init__(self, local: LocalModel, beta: float, shifted: FeasibleSet):
        self.local = local
        self.beta = beta
        self.shifted = shifted
        self.evaluations = 0

    def direction(self, weights: np.ndarray) -> np.ndarray:
        b = self.beta * (weights @ self.local.directional)
        return self.shifted.project(-b)

    def value(self, weights: np.ndarray) -> tuple[float, np.ndarray]:
        self.evaluations += 1
        v = self.direction(weights)
        b = self.beta * (weights @ self.local.directional)
        return 0.5 * float(v @ v) + float(b @ v), v


def _pair(lam: float) -> np.ndarray:
    return np.array([lam, 1.0 - lam])


def _golden_points(dual: _Dual, width: float) -> Iterator[tuple[float, float, np.ndarray]]:
    """Golden-section ascent on ``lam -> g((lam, 1 - lam))`` over [0, 1].

    Yields every evaluated ``(lam, g, v)`` in order; the last yield is the best
    point of the final bracket (endpoints included).
    """
    lo, hi = 0.0, 1.0
    a = hi - INV_PHI * (hi - lo)
    b = lo + INV_PHI * (hi - lo)
    ga, va = dual.value(_pair(a))
    yield a, ga, va
    gb, vb = dual.value(_pair(b))
    yield b, gb, vb
    while hi - lo > width:
        if ga >= gb:
            hi, b, gb, vb = b, a, ga, va
            a = hi - INV_PHI * (hi - lo)
            ga, va = dual.value(_pair(a))
            yield a, ga, va
        else:
            lo, a, ga, va = a, b, gb, vb
            b = lo + INV_PHI * (hi - lo)
            gb, vb = dual.value(_pair(b))
            yield b, gb, vb
    best = max(
        ((lo, *dual.value(_pair(lo))), (hi, *dual.value(_pair(hi))), (a, ga, va), (b, gb, vb)),
        key=lambda t: t[1],
    )
    yield best


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


def _simplex_ascent(dual: _Dual, start: np.ndarray, tol: float, max_iter: int = 10_000
                    ) -> Iterator[tuple[np.ndarray, float, np.ndarray]]:
    """Projected gradient ascent of ``g`` on the simplex; yields each iterate.

    ``grad g(w)_i = beta * y_i^T J_F(x) v_w``; ``g`` has a
    ``beta^2 ||Y J||^2``-Lipschitz gradient, which fixes the step.
    """
    D = dual.local.directional
    lip = dual.beta ** 2 * float(np.linalg.norm(D, 2)) ** 2
    step = 1.0 / lip if lip > 0 else 1.0
    w = project_simplex(start)
    g, v = dual.value(w)
    yield w, g, v
    for _ in range(max_iter):
        grad = dual.beta * (D @ v)
        w_new = project_simplex(w + step * grad)
        moved = float(np.linalg.norm(w_new - w))
        w = w_new
        g, v = dual.value(w)
        yield w, g, v
        if moved < tol:
            return


def _result(local: LocalModel, beta: float, v: np.ndarray, mode: Mode, **kw) -> DirectionResult:
    if float(np.linalg.norm(v)) <= ZERO_TOL:
        v = np.zeros_like(v)
        mode = Mode.ZERO
        kw.pop("delta", None)
    ph, _ = local.phi(v)
    return DirectionResult(v=v, phi_value=ph, model_value=0.5 * float(v @ v) + beta * ph, mode=mode, **kw)


def _polish(local: LocalModel, beta: float, shifted: FeasibleSet, v: np.ndarray, steps: int = 50) -> np.ndarray:
    """Projected subgradient descent on the primal model; returns the best point seen."""
    t = 1.0 / (1.0 + beta * float(np.linalg.norm(local.jac, 2)) ** 2)
    best, best_val = v, local.model(v, beta)
    for _ in range(steps):
        _, i = local.phi(v)
        v = shifted.project(v - t * (v + beta * local.directional[i]))
        val = local.model(v, beta)
        if val < best_val:
            best, best_val = v, val
    return best


def solve_exact(ctx, x, beta: float, feasible: FeasibleSet, tol: float = 1e-10,
                method: str = "auto", start: Optional[np.ndarray] = None) -> DirectionResult:
    """Exact direction ``v(x)`` via the dual.

    ``method`` is ``"golden"`` (two generators only), ``"simplex"`` (projected
    gradient ascent from ``start``, default the barycenter) or ``"auto"``.
    The zero direction is always a candidate, so the returned model value is
    never positive.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    ctx = _context(ctx)
    local = ctx.at(x)
    shifted = feasible.translate(local.x)
    dual = _Dual(local, beta, shifted)
    k = local.gens.shape[0]
    if method == "auto":
        method = "golden" if k == 2 else "simplex"

    if k == 1:
        w = np.ones(1)
        g, v = dual.value(w)
    elif method == "golden":
        if k != 2:
            raise ValueError("golden-section dual solve needs exactly two generators")
        for lam, g, v in _golden_points(dual, tol):
            pass
        w = _pair(lam)
    elif method == "simplex":
        s = np.full(k, 1.0 / k) if start is None else np.asarray(start, dtype=float)
        for w, g, v in _simplex_ascent(dual, s, tol):
            pass
    else:
        raise ValueError(f"unknown method {method!r}")

    warnings = []
    model = local.model(v, beta)
    gap = model - g
    if not feasible.convex:
        polished = _polish(local, beta, shifted, v)
        if local.model(polished, beta) < model:
            v = polished
            model = local.model(v, beta)
    if gap > 10 * tol:
        msg = f"dual gap {gap:.3e} at x={local.x.tolist()}"
        if feasible.convex:
            log.warning(msg)
        warnings.append(msg)
    if model > 0.0:
        v = np.zeros_like(v)
    return _result(local, beta, v, Mode.EXACT, weight=w, dual_iterations=dual.evaluations,
                   dual_value=g, warnings=warnings)


def _check_weights(weights, k: int) -> np.ndarray:
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    if w.shape != (k,):
        raise ValueError(f"expected {k} weights, got shape {w.shape}")
    if np.any(w < -SIMPLEX_TOL) or abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
        raise ValueError("weights must lie on the unit simplex")
    return w


def s_compatible_direction(ctx, x, beta: float, feasible: FeasibleSet, weights) -> np.ndarray:
    """``P_{C-x}(-beta J_F(x)^T w_bar)`` with ``w_bar = sum_i weights_i y_i``."""
    ctx = _context(ctx)
    local = ctx.at(x)
    w = _check_weights(weights, local.gens.shape[0])
    return _Dual(local, beta, feasible.translate(local.x)).direction(w)


def sufficient(local: LocalModel, beta: float, v: np.ndarray, weights: np.ndarray, delta: float,
               slack: float = 0.0) -> bool:
    """The sufficiency test that certifies an s-compatible ``v`` as delta-approximate."""
    ph, _ = local.phi(v)
    lhs = beta * ph
    rhs = (1.0 - delta) * beta * float((weights @ local.directional) @ v) - 0.5 * delta * float(v @ v)
    return lhs <= rhs + slack


def _candidates(dual: _Dual, k: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    if k == 1:
        w = np.ones(1)
        yield w, dual.direction(w)
        return
    if k == 2:
        w = _pair(0.5)
        yield w, dual.direction(w)
        for lam, _g, v in _golden_points(dual, 0.0):
            yield _pair(lam), v
        return
    for w, _g, v in _simplex_ascent(dual, np.full(k, 1.0 / k), 0.0):
        yield w, v


def delta_approx_direction(ctx, x, beta: float, feasible: FeasibleSet, delta: float,
                           budget: int = 8, tol: float = 1e-10) -> DirectionResult:
    """First s-compatible direction passing the sufficiency test.

    Candidate weights start at the barycenter and follow the dual ascent, so
    later candidates approach the exact direction. Only descent candidates
    (negative model value) are accepted; a zero candidate certifies
    stationarity. After ``budget`` rejections the exact direction is returned.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError("delta must lie in [0, 1)")
    if beta <= 0:
        raise ValueError("beta must be positive")
    ctx = _context(ctx)
    local = ctx.at(x)
    shifted = feasible.translate(local.x)
    dual = _Dual(local, beta, shifted)
    k = local.gens.shape[0]
    tried = 0
    for w, v in _candidates(dual, k):
        if tried >= budget:
            break
        tried += 1
        if float(np.linalg.norm(v)) <= ZERO_TOL:
            if feasible.convex:
                return _result(local, beta, v, Mode.ZERO, weight=w, candidates_tried=tried)
            continue
        if local.model(v, beta) < 0.0 and sufficient(local, beta, v, w, delta):
            return _result(local, beta, v, Mode.DELTA_APPROX, delta=delta, weight=w,
                           dual_iterations=dual.evaluations, candidates_tried=tried)
    res = solve_exact(ctx, x, beta, feasible, tol=tol)
    res.candidates_tried = tried
    return res


def direction(ctx, x, beta: float, feasible: FeasibleSet, delta: Optional[float] = None,
              budget: int = 8, tol: float = 1e-10) -> DirectionResult:
    """Exact direction when ``delta`` is None, otherwise a delta-approximate one."""
    if delta is None:
        return solve_exact(ctx, x, beta, feasible, tol=tol)
    return delta_approx_direction(ctx, x, beta, feasible, delta, budget=budget, tol=tol)
