import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import ex61_direction, ex61_model
from varpg import (ScalarizationContext, cone_strict_contains, example_6_1, example_6_2, example_6_3, phi, rho,
                   solve_exact, theta)
from varpg.problems import random_starts
from varpg.scalarization import ScalarizationError

SQ2 = math.sqrt(2.0)
EX61 = example_6_1()
CTX61 = ScalarizationContext(EX61)
PROBLEMS = {"ex6.1": EX61, "ex6.2": example_6_2(), "ex6.3": example_6_3()}


class TestRho:
    def test_ex61(self):
        assert rho(CTX61, [1.0], [1.0, 2.0]) == pytest.approx(1.0)

    def test_zero(self):
        assert rho(CTX61, [1.0], [0.0, 0.0]) == 0.0

    def test_scaled(self):
        assert rho(CTX61, [1.0], [2.0, 4.0]) == pytest.approx(2.0)

    def test_length_check(self):
        with pytest.raises(ValueError):
            rho(CTX61, [1.0], [1.0])


class TestPhi:
    def test_ex61(self):
        val, idx = phi(CTX61, [1.0], [-0.5])
        assert val == pytest.approx((0.5 - 1.0) / SQ2)
        assert idx == 1

    def test_zero(self):
        assert phi(CTX61, [0.3], [0.0])[0] == 0.0

    @pytest.mark.parametrize("v", np.linspace(-(SQ2 - 1), 2 - SQ2, 9))
    def test_nonnegative_at_boundary_point(self, v):
        assert phi(CTX61, [SQ2 - 1], [v])[0] >= -1e-15

    def test_first_index_on_ties(self):
        # v = 0 ties every generator.
        assert phi(CTX61, [0.7], [0.0])[1] == 0


class TestTheta:
    def test_ex61_closed_form(self):
        assert theta(CTX61, [1.0], 1.0, [-1 / SQ2]) == pytest.approx(-0.25, abs=1e-15)

    def test_stationary(self):
        d = solve_exact(CTX61, [SQ2 - 1], 1.0, EX61.feasible)
        assert theta(CTX61, [SQ2 - 1], 1.0, d.v) == 0.0

    def test_zero_direction(self):
        assert theta(CTX61, [0.8], 1.0, [0.0]) == 0.0

    def test_rejects_positive(self):
        with pytest.raises(ScalarizationError):
            theta(CTX61, [0.8], 1.0, [0.1])


def _ctx_and_point(name, seed):
    return ScalarizationContext(PROBLEMS[name]), random_starts(name, 1, seed)[0]


@pytest.mark.parametrize("name", sorted(PROBLEMS))
class TestPhiProperties:
    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000), v=arrays(float, 2, elements=st.floats(-10, 10)),
           lam=st.floats(0, 100))
    def test_positive_homogeneity(self, name, seed, v, lam):
        ctx, x = _ctx_and_point(name, seed)
        v = v[: ctx.problem.n]
        assert phi(ctx, x, lam * v)[0] == pytest.approx(lam * phi(ctx, x, v)[0], abs=1e-12 * max(1, lam))

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000), u=arrays(float, 2, elements=st.floats(-10, 10)),
           v=arrays(float, 2, elements=st.floats(-10, 10)))
    def test_sublinear(self, name, seed, u, v):
        ctx, x = _ctx_and_point(name, seed)
        n = ctx.problem.n
        assert phi(ctx, x, u[:n] + v[:n])[0] <= phi(ctx, x, u[:n])[0] + phi(ctx, x, v[:n])[0] + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 10_000), v=arrays(float, 2, elements=st.floats(-10, 10)))
    def test_sign_characterization(self, name, seed, v):
        ctx, x = _ctx_and_point(name, seed)
        p = ctx.problem
        v = v[: p.n]
        val = phi(ctx, x, v)[0]
        inside = cone_strict_contains(p.cone(x), -(p.J(x) @ v), 1e-12)
        # Skip directions within rounding of the cone boundary.
        if abs(val) > 1e-9 * max(1.0, float(np.linalg.norm(v))):
            assert (val < 0) == inside


def test_phi_lipschitz_in_x():
    # Empirical ratio over a grid stays bounded for the scalar example.
    xs = np.linspace(0.0, 1.0, 101)
    zs = np.linspace(-1.0, 1.0, 21)
    ratios = []
    for a, b in zip(xs, xs[1:]):
        for z in zs:
            ratios.append(abs(phi(CTX61, [a], [z])[0] - phi(CTX61, [b], [z])[0]) / (b - a))
    assert max(ratios) < 5.0


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_theta_nonpositive_on_samples(name):
    problem = PROBLEMS[name]
    ctx = ScalarizationContext(problem)
    for x in random_starts(name, 334, seed=11):
        d = solve_exact(ctx, x, 1.0, problem.feasible)
        assert theta(ctx, x, 1.0, d.v) <= 1e-10


@pytest.mark.parametrize("x", np.linspace(0.0, 1.0, 41))
def test_theta_zero_iff_stationary_ex61(x):
    d = solve_exact(CTX61, [x], 1.0, EX61.feasible)
    expected = ex61_model(x, 1.0, ex61_direction(x, 1.0))
    assert d.model_value == pytest.approx(expected, abs=1e-10)
    if x <= SQ2 - 1:
        assert d.model_value == 0.0
    else:
        assert d.model_value < 0.0
