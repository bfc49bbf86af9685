import unittest

import numpy as np
from parameterized import parameterized

from synthlab.cones import lineality_decompose, polytope_width_bound
from synthlab.dictionaries import make_identity
from synthlab.models import PolyhedralCone
from synthlab.solvers import project_cone
from synthlab.width import estimate_mean_width, estimate_statdim, estimate_statdim_decomposed, \
    sparse_descent_width_bound


def random_cone(rng):
    n = int(rng.integers(1, 21))
    k = int(rng.integers(1, 41))
    return PolyhedralCone(rng.standard_normal((n, k))), rng.standard_normal(n)


def subspace_cone(n, dimension, seed):
    basis = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, dimension)))[0]
    return PolyhedralCone(np.hstack([basis, -basis]))


def unit_ball_points(n, k, rng):
    points = rng.standard_normal((n, k))
    radii = rng.uniform(0.0, 1.0, k) ** (1.0 / n)
    return points / np.linalg.norm(points, axis=0) * radii


class TestMoreau(unittest.TestCase):

    def test_random_pairs(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            cone, g = random_cone(rng)
            projection = project_cone(cone, g)
            remainder = g - projection
            self.assertLess(abs(float(projection @ remainder)), 1e-8)
            self.assertLess(abs(float(g @ g - projection @ projection - remainder @ remainder)), 1e-8)
            # The remainder lies in the polar cone.
            scale = max(1.0, float(np.linalg.norm(cone.generators) * np.linalg.norm(g)))
            self.assertLess(float(np.max(cone.generators.T @ remainder)), 1e-8 * scale)


class TestStatisticalDimension(unittest.TestCase):

    @parameterized.expand([
        [10, 1],
        [20, 7],
        [30, 15],
    ])
    def test_subspace(self, n, dimension):
        estimate = estimate_statdim(subspace_cone(n, dimension, n), samples=300, seed=n)
        self.assertLessEqual(abs(estimate.statdim - dimension), 3.0 * estimate.stderr)

    def test_orthant(self):
        estimate = estimate_statdim(PolyhedralCone(np.eye(50)), samples=300, seed=0)
        self.assertLessEqual(abs(estimate.statdim - 25.0), 3.0 * estimate.stderr)

    def test_sparse_descent_bound(self):
        rng = np.random.default_rng(7)
        for pair in range(20):
            d = int(rng.integers(10, 61))
            s = int(rng.integers(1, d // 2 + 1))
            z = np.zeros(d)
            z[rng.choice(d, s, replace=False)] = rng.choice([-1.0, 1.0], s)
            decomposition = lineality_decompose(make_identity(d), z, with_circumcenter=False)
            estimate = estimate_statdim_decomposed(decomposition, samples=300, seed=pair)
            self.assertLessEqual(estimate.statdim - 1.0, sparse_descent_width_bound(s, d))


class TestPolytopeWidth(unittest.TestCase):

    def test_random_polytopes(self):
        rng = np.random.default_rng(11)
        violations = 0
        for index in range(100):
            n = int(rng.integers(1, 51))
            k = int(rng.integers(5, 201))
            mean, _ = estimate_mean_width(unit_ball_points(n, k, rng), samples=2000, seed=index)
            violations += mean > polytope_width_bound(k)
        self.assertLessEqual(violations, 1)
