import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import boundary_rays_2d, sample_cone
from varpg import (GeneratorSet, NormCone, Polyhedral, VariableOrder, cone_contains, cone_strict_contains,
                   dual_generators, estimate_generator_lipschitz, example_6_1, example_6_2, example_6_3,
                   hausdorff_distance)
from varpg.order import ConeError

SQ2 = math.sqrt(2.0)


def k61(x):
    return example_6_1().cone([x])


class TestConstruction:
    def test_norm_cone_needs_interior(self):
        with pytest.raises(ConeError):
            NormCone([0.6, 0.8])

    def test_polyhedral_not_pointed(self):
        with pytest.raises(ConeError):
            Polyhedral([[1.0, 0.0]])

    def test_zero_row(self):
        with pytest.raises(ConeError):
            Polyhedral([[0.0, 0.0], [1.0, 0.0]])

    def test_parallel_rays(self):
        with pytest.raises(ConeError):
            Polyhedral.from_rays([1, 1], [2, 2])

    def test_bad_sense(self):
        with pytest.raises(ConeError):
            Polyhedral([[1, 0], [0, 1]], [">=", "<"])


class TestMembership:
    def test_ex61_boundary_member(self):
        assert cone_contains(k61(1.0), [1.0, 1.0], 0.0)

    @pytest.mark.parametrize("cone", [k61(1.0), NormCone([3.0, -2.0]), Polyhedral.orthant(3)])
    def test_zero_is_member(self, cone):
        assert cone_contains(cone, np.zeros(cone.dim))
        assert not cone_strict_contains(cone, np.zeros(cone.dim), 1e-9)

    def test_ex62_norm_cone(self):
        cone = NormCone(np.array([3.0, -2.0]) / math.pi)
        assert not cone_contains(cone, [0.0, 1.0])

    def test_strict_interior(self):
        assert cone_strict_contains(k61(1.0), [1.0, 2.0], 1e-9)

    def test_strict_boundary(self):
        assert not cone_strict_contains(k61(1.0), [1.0, 1.0], 1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ConeError):
            cone_contains(k61(1.0), [1.0, 2.0, 3.0])

    def test_negative_margin(self):
        with pytest.raises(ConeError):
            cone_contains(k61(1.0), [1.0, 2.0], -1.0)

    @given(st.floats(-10, 10), st.floats(-10, 10), st.floats(1e-3, 1e3))
    def test_scaling_and_strict_implies_closed(self, a, b, lam):
        for cone in (k61(0.4), NormCone([2.0, 1.0])):
            z = np.array([a, b])
            assert cone_contains(cone, lam * z) == cone_contains(cone, z)
            if cone_strict_contains(cone, z, 1e-9):
                assert cone_contains(cone, z)


class TestDualGenerators:
    def test_ex61_at_one(self):
        G = dual_generators(k61(1.0)).generators
        np.testing.assert_allclose(G, [[1.0, 0.0], [-1 / SQ2, 1 / SQ2]], atol=1e-15)

    def test_orthant(self):
        np.testing.assert_allclose(dual_generators(Polyhedral.orthant(2)).generators, np.eye(2))

    def test_norm_cone(self):
        G = dual_generators(NormCone([0.0, 2.0])).generators
        expected = [[math.cos(math.pi / 3), math.sin(math.pi / 3)],
                    [math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)]]
        np.testing.assert_allclose(G, expected, atol=1e-12)
        Z = sample_cone(NormCone([0.0, 2.0]), 1000, np.random.default_rng(1))
        assert np.all(Z @ G.T >= -1e-12)

    def test_from_rays_matches_rows(self):
        cone = Polyhedral.from_rays([0.0, 1.0], [1.0, 1.0])
        np.testing.assert_allclose(dual_generators(cone).generators,
                                   dual_generators(k61(1.0)).generators, atol=1e-15)

    def test_redundant_rows_dropped(self):
        cone = Polyhedral([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        assert len(dual_generators(cone)) == 2

    def test_three_dim_polyhedral(self):
        G = dual_generators(Polyhedral.orthant(3)).generators
        np.testing.assert_allclose(G, np.eye(3))

    def test_three_dim_norm_cone_unsupported(self):
        with pytest.raises(ConeError):
            dual_generators(NormCone([2.0, 0.0, 0.0]))


class TestGeneratorSet:
    def test_unit(self):
        with pytest.raises(ConeError):
            GeneratorSet(np.array([[2.0, 0.0]]))

    def test_duplicates(self):
        with pytest.raises(ConeError):
            GeneratorSet(np.array([[1.0, 0.0], [1.0, 0.0]]))

    def test_empty(self):
        with pytest.raises(ConeError):
            GeneratorSet(np.zeros((0, 2)))


class TestHausdorff:
    def test_same(self):
        A = GeneratorSet(np.eye(2))
        assert hausdorff_distance(A, A) == 0.0

    def test_points(self):
        assert hausdorff_distance(GeneratorSet([[1.0, 0.0]]), GeneratorSet([[0.0, 1.0]])) == pytest.approx(SQ2)

    def test_one_sided(self):
        # (0, 1) is sqrt(2) away from the only point of B.
        assert hausdorff_distance(GeneratorSet(np.eye(2)), GeneratorSet([[1.0, 0.0]])) == pytest.approx(SQ2)

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=4, unique=True),
           st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=4, unique=True),
           st.lists(st.floats(0, 2 * math.pi), min_size=1, max_size=4, unique=True))
    def test_metric(self, a, b, c):
        def make(angles):
            pts = np.array([[math.cos(t), math.sin(t)] for t in angles])
            keep = [p for i, p in enumerate(pts) if all(np.linalg.norm(p - q) > 1e-9 for q in pts[:i])]
            return GeneratorSet(np.array(keep))
        A, B, C = make(a), make(b), make(c)
        assert hausdorff_distance(A, B) == pytest.approx(hausdorff_distance(B, A))
        assert hausdorff_distance(A, C) <= hausdorff_distance(A, B) + hausdorff_distance(B, C) + 1e-12


class TestLipschitzEstimate:
    def test_constant_mapping(self):
        order = VariableOrder.constant(Polyhedral.orthant(2))
        assert estimate_generator_lipschitz(order, [([0.0], [1.0]), ([2.0], [3.0])]) == 0.0

    def test_ex61_endpoints(self):
        order = example_6_1().order
        assert estimate_generator_lipschitz(order, [([0.0], [1.0])]) == pytest.approx(0.0, abs=1e-15)

    def test_ex61_half(self):
        order = example_6_1().order
        assert estimate_generator_lipschitz(order, [([0.0], [0.5])]) == pytest.approx(0.181257684687765, rel=1e-9)

    def test_coincident(self):
        with pytest.raises(ConeError):
            estimate_generator_lipschitz(example_6_1().order, [([0.5], [0.5])])


def _example_cones():
    rng = np.random.default_rng(7)
    cones = [k61(x) for x in np.linspace(0.0, 1.0, 6)]
    p2 = example_6_2()
    for _ in range(5):
        x = p2.feasible.project(rng.uniform(-2.5, 2.5, 2))
        cones.append(p2.cone(x))
    p3 = example_6_3()
    cones += [p3.cone(x) for x in [np.array([0.9011, 0.5589]), np.array([0.7, 0.9]), np.array([1.0, 1.0])]]
    return cones


@pytest.mark.parametrize("cone", _example_cones(), ids=repr)
class TestSampledInvariants:
    def test_duality(self, cone):
        G = dual_generators(cone).generators
        Z = sample_cone(cone, 1000, np.random.default_rng(0))
        assert np.min(Z @ G.T) >= -1e-10

    def test_pointed(self, cone):
        Z = sample_cone(cone, 1000, np.random.default_rng(1))
        assert not any(cone_contains(cone, -z) for z in Z)

    def test_completeness(self, cone):
        # Unit vectors in the dual cone are nonnegative combinations of the generators.
        G = dual_generators(cone).generators
        Z = np.vstack([sample_cone(cone, 1000, np.random.default_rng(2)), boundary_rays_2d(cone)])
        rng = np.random.default_rng(3)
        for _ in range(200):
            w = rng.standard_normal(2)
            w /= np.linalg.norm(w)
            if np.min(Z @ w) < 0:
                continue
            coef = np.linalg.solve(G.T, w)
            assert np.all(coef >= -1e-8)
            assert np.linalg.norm(G.T @ coef - w) <= 1e-8


def test_bounding_cone_ex61():
    p = example_6_1()
    rng = np.random.default_rng(5)
    for x in np.linspace(0.0, 1.0, 21):
        for z in sample_cone(p.cone([x]), 200, rng):
            assert cone_contains(p.order.bounding_cone, z, 1e-12)
