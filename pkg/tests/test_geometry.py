import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from varpg import Annulus, Ball, Box, Custom, Intersection, example_6_3
from varpg.geometry import ProjectionError, contains, dykstra, project, translate
from varpg.problems import disk_slack, ring_slack

coords = st.floats(-20, 20, allow_nan=False)
points2 = arrays(float, 2, elements=coords)

EX62_SET = Annulus([0.0, 0.0], math.sqrt(math.pi), math.sqrt(2 * math.pi))


class TestBox:
    def test_interior_fixed(self):
        assert project(Box([0.0], [1.0]), [0.3])[0] == 0.3

    def test_translated(self):
        shifted = translate(Box([0.0], [1.0]), [1.0])
        assert isinstance(shifted, Box)
        np.testing.assert_array_equal(shifted.lower, [-1.0])
        np.testing.assert_array_equal(shifted.upper, [0.0])
        assert project(shifted, [-0.5])[0] == -0.5
        assert project(shifted, [0.3])[0] == 0.0

    def test_zero_shift_is_identity(self):
        same = translate(Box([0.0], [1.0]), [0.0])
        np.testing.assert_array_equal(same.lower, [0.0])
        np.testing.assert_array_equal(same.upper, [1.0])

    def test_contains(self):
        assert contains(Box([0.0], [1.0]), [0.5], 0.0)

    def test_reversed_bounds(self):
        with pytest.raises(ValueError):
            Box([1.0], [0.0])

    def test_dimension(self):
        with pytest.raises(ValueError):
            project(Box([0.0], [1.0]), [0.0, 1.0])


class TestBall:
    def test_translate(self):
        b = translate(Ball([1.0, 2.0], 0.5), [0.5, 0.5])
        np.testing.assert_array_equal(b.center, [0.5, 1.5])
        assert b.radius == 0.5

    def test_project_outside(self):
        np.testing.assert_allclose(project(Ball([0.0, 0.0], 1.0), [3.0, 4.0]), [0.6, 0.8])


class TestAnnulus:
    def test_inner_push(self):
        y = project(EX62_SET, [0.1, 0.1])
        np.testing.assert_allclose(y, [math.sqrt(math.pi / 2)] * 2, rtol=1e-12)
        assert y @ y == pytest.approx(math.pi)

    def test_center_tie_break(self):
        np.testing.assert_allclose(project(EX62_SET, [0.0, 0.0]), [math.sqrt(math.pi), 0.0])

    def test_contains(self):
        assert not contains(EX62_SET, [1.0, 1.0], 0.0)

    def test_nonconvex_flag(self):
        assert not EX62_SET.convex
        assert Annulus([0.0], 0.0, 1.0).convex

    def test_bad_radii(self):
        with pytest.raises(ValueError):
            Annulus([0.0, 0.0], 2.0, 1.0)

    @given(points2)
    def test_radius_range(self, x):
        y = project(EX62_SET, x)
        r = np.linalg.norm(y)
        assert math.sqrt(math.pi) - 1e-12 <= r <= math.sqrt(2 * math.pi) + 1e-12
        if EX62_SET.contains(x, 0.0):
            np.testing.assert_array_equal(y, x)


class TestEx63Set:
    def test_wavy_violation(self):
        s = example_6_3().feasible
        assert disk_slack(np.array([0.7, 0.7])) == pytest.approx(0.5 - 0.08)
        assert ring_slack(np.array([0.7, 0.7])) == pytest.approx(-0.12)
        assert not s.contains([0.7, 0.7], 0.0)

    @settings(max_examples=200)
    @given(arrays(float, 2, elements=st.floats(-2, 3)))
    def test_projection_feasible(self, x):
        s = example_6_3().feasible
        y = s.project(x)
        assert s.contains(y, 1e-9)
        if s.contains(x, 0.0):
            np.testing.assert_array_equal(y, x)


CONVEX_SETS = [
    Box([0.0, -1.0], [1.0, 2.0]),
    Ball([0.5, 0.5], 1.5),
    Intersection((Box([0.0, 0.0], [2.0, 2.0]), Ball([0.0, 0.0], 2.5))),
]


@pytest.mark.parametrize("C", CONVEX_SETS, ids=["box", "ball", "box-ball"])
class TestConvexProjection:
    @settings(max_examples=40, deadline=None)
    @given(points2, points2)
    def test_nonexpansive_idempotent(self, C, u, v):
        pu, pv = C.project(u), C.project(v)
        assert C.contains(pu, 1e-9)
        assert np.linalg.norm(pu - pv) <= np.linalg.norm(u - v) + 1e-9
        np.testing.assert_allclose(C.project(pu), pu, atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(points2, points2)
    def test_obtuse_angle(self, C, u, c):
        c = C.project(c)
        pu = C.project(u)
        assert (u - pu) @ (c - pu) <= 1e-8 * max(1.0, np.linalg.norm(u))

    @settings(max_examples=40, deadline=None)
    @given(points2, points2)
    def test_translate_identity(self, C, u, x):
        # Dykstra stops at 1e-10, so the intersection only agrees to that level.
        atol = 1e-9 if isinstance(C, Intersection) else 1e-12 * max(1.0, float(np.abs(u + x).max()))
        np.testing.assert_allclose(C.translate(x).project(u) + x, C.project(u + x), atol=atol)


class TestDykstra:
    @settings(max_examples=50, deadline=None)
    @given(points2)
    def test_boxes(self, x):
        a = Box([0.0, 0.0], [2.0, 2.0])
        b = Box([1.0, -1.0], [3.0, 1.5])
        expected = Box([1.0, 0.0], [2.0, 1.5]).project(x)
        np.testing.assert_allclose(Intersection((a, b)).project(x), expected, atol=1e-9)

    def test_empty_intersection(self):
        with pytest.raises(ProjectionError):
            dykstra([Box([0.0], [1.0]), Box([2.0], [3.0])], [5.0])

    def test_tangent_contact_reported(self):
        # The top edge touches the disk at (0, 2); convergence there is too
        # slow for the sweep cap and the failure carries its residual.
        C = Intersection((Box([0.0, 0.0], [2.0, 2.0]), Ball([0.0, 0.0], 2.0)))
        with pytest.raises(ProjectionError) as err:
            C.project([0.25, 13.25])
        assert err.value.residual < 1e-9

    def test_nonconvex_part_rejected(self):
        with pytest.raises(ValueError):
            Intersection((Box([0.0, 0.0], [1.0, 1.0]), EX62_SET))


def test_custom_delegates():
    s = Custom(lambda x, tol: abs(x[0]) <= 1 + tol, lambda x: np.clip(x, -1, 1), dim=1, convex=True)
    assert s.project([3.0])[0] == 1.0
    assert translate(s, [1.0]).project([3.0])[0] == 0.0
