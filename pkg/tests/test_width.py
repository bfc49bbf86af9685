import math
import unittest

import numpy as np
from parameterized import parameterized

from synthlab.cones import descent_generators, lineality_decompose
from synthlab.dictionaries import make_duplicated_identity, make_identity
from synthlab.errors import DomainError
from synthlab.models import ConeDecomposition, Dictionary, PolyhedralCone, WidthEstimate
from synthlab.width import error_bound_coef, error_bound_signal, estimate_mean_width, estimate_statdim, \
    estimate_statdim_decomposed, gaussian_sample, predict_m0, sparse_descent_width_bound, upper_bound_lambda_min


def subspace_cone(n, dimension, seed=0):
    basis = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, dimension)))[0]
    return PolyhedralCone(np.hstack([basis, -basis]))


def sparse_vector(d, support):
    z = np.zeros(d)
    z[support] = [(-1.0) ** index * (index + 1.0) for index in range(len(support))]
    return z


class TestStatisticalDimension(unittest.TestCase):

    def test_subspace(self):
        estimate = estimate_statdim(subspace_cone(10, 4), samples=300, seed=1)
        self.assertLessEqual(abs(estimate.statdim - 4.0), 4.0 * estimate.stderr)
        self.assertEqual((estimate.samples, estimate.seed), (300, 1))

    def test_deterministic(self):
        cone = descent_generators(make_identity(12), sparse_vector(12, [0, 5]))
        first = estimate_statdim(cone, samples=40, seed=3)
        self.assertEqual(first, estimate_statdim(cone, samples=40, seed=3))
        self.assertNotEqual(first.statdim, estimate_statdim(cone, samples=40, seed=4).statdim)

    def test_threads(self):
        cone = descent_generators(make_identity(12), sparse_vector(12, [0, 5]))
        self.assertEqual(estimate_statdim(cone, samples=40, seed=3, threads=1),
                         estimate_statdim(cone, samples=40, seed=3, threads=4))

    def test_samples_domain(self):
        with self.assertRaises(DomainError):
            estimate_statdim(subspace_cone(4, 2), samples=1)

    def test_gaussian_sample(self):
        np.testing.assert_array_equal(gaussian_sample(5, 2, 7), gaussian_sample(5, 2, 7))
        self.assertFalse(np.array_equal(gaussian_sample(5, 2, 7), gaussian_sample(5, 2, 8)))

    def test_monotone_under_inclusion(self):
        generators = np.random.default_rng(2).uniform(0.1, 1.0, (6, 5))
        extra = np.random.default_rng(3).standard_normal((6, 1))
        smaller = estimate_statdim(PolyhedralCone(generators), samples=100, seed=9)
        larger = estimate_statdim(PolyhedralCone(np.hstack([generators, extra])), samples=100, seed=9)
        self.assertGreaterEqual(larger.statdim, smaller.statdim - 1e-9)

    ####################################################################################################################
    # Decomposed estimate
    ####################################################################################################################

    def test_pure_subspace(self):
        basis = np.linalg.qr(np.random.default_rng(0).standard_normal((6, 3)))[0]
        estimate = estimate_statdim_decomposed(ConeDecomposition(basis), samples=10, seed=0)
        self.assertEqual(estimate, WidthEstimate(3.0, 0.0, 10, 0))

    def test_decomposed_orthant(self):
        # R^6 = span(e_1) (+) orthant of the remaining coordinates: delta = 1 + 5 / 2.
        identity = np.eye(6)
        decomposition = ConeDecomposition(identity[:, :1], PolyhedralCone(identity[:, 1:]))
        estimate = estimate_statdim_decomposed(decomposition, samples=400, seed=2)
        self.assertLessEqual(abs(estimate.statdim - 3.5), 4.0 * estimate.stderr)

    def test_decomposed_matches_full(self):
        dictionary = make_identity(16)
        z = sparse_vector(16, [1, 6, 11])
        full = estimate_statdim(descent_generators(dictionary, z), samples=300, seed=5)
        decomposed = estimate_statdim_decomposed(lineality_decompose(dictionary, z, with_circumcenter=False),
                                                 samples=300, seed=6)
        combined = math.hypot(full.stderr, decomposed.stderr)
        self.assertLessEqual(abs(full.statdim - decomposed.statdim), 4.0 * combined)
        self.assertLessEqual(decomposed.statdim - 1.0, sparse_descent_width_bound(3, 16) + 3.0 * decomposed.stderr)

    ####################################################################################################################
    # Mean width
    ####################################################################################################################

    def test_mean_width_segment(self):
        mean, stderr = estimate_mean_width(np.array([[1.0, -1.0], [0.0, 0.0]]), samples=2000, seed=0)
        self.assertLessEqual(abs(mean - math.sqrt(2.0 / math.pi)), 4.0 * stderr)

    def test_mean_width_point(self):
        mean, _ = estimate_mean_width(np.zeros((3, 1)), samples=10)
        self.assertEqual(mean, 0.0)


class TestPredictions(unittest.TestCase):

    @parameterized.expand([
        [10, 10, 20.0],
        [10, 100, 20.0 * math.log(10.0) + 20.0],
    ])
    def test_sparse_descent_width_bound(self, s, d, expected):
        self.assertAlmostEqual(sparse_descent_width_bound(s, d), expected)

    def test_sparse_descent_width_bound_value(self):
        self.assertAlmostEqual(sparse_descent_width_bound(10, 100), 66.0517, places=4)

    @parameterized.expand([
        [25.0, 0.0, 26.0],
        [0.0, 0.0, 1.0],
        [25.0, 2.0, 50.0],
    ])
    def test_predict_m0(self, width_sq, u, expected):
        self.assertAlmostEqual(predict_m0(width_sq, u).m0, expected)

    def test_predict_m0_from_estimate(self):
        prediction = predict_m0(WidthEstimate(16.0, 0.5, 300, 0))
        self.assertAlmostEqual(prediction.m0, 17.0)
        self.assertEqual(prediction.width_sq, 16.0)

    def test_predict_m0_subgaussian(self):
        prediction = predict_m0(9.0, 1.0, "rademacher", c_const=2.0, gamma=1.5)
        self.assertAlmostEqual(prediction.m0, 4.0 * 1.5 ** 4 * 16.0 + 1.0)

    def test_predict_m0_domain(self):
        with self.assertRaises(DomainError):
            predict_m0(9.0, -1.0)
        with self.assertRaises(DomainError):
            predict_m0(9.0, 0.0, "bernoulli")

    ####################################################################################################################
    # Error bounds
    ####################################################################################################################

    def test_signal_bound(self):
        self.assertEqual(error_bound_signal(0.0, 50, 10), 0.0)
        self.assertAlmostEqual(error_bound_signal(1.0, 101, 1), 0.2)

    def test_signal_bound_decreasing(self):
        values = [error_bound_signal(0.5, m, 20.0) for m in (25, 50, 100, 200)]
        self.assertEqual(values, sorted(values, reverse=True))

    def test_signal_bound_vacuous(self):
        with self.assertRaises(DomainError):
            error_bound_signal(0.5, 20, 20.0)

    def test_coefficient_bound(self):
        self.assertAlmostEqual(error_bound_coef(0.5, 60, 12.0, 1.0), error_bound_signal(0.5, 60, 12.0))
        self.assertAlmostEqual(error_bound_coef(1.0, 101, 1, 0.1), 2.0)
        self.assertEqual(error_bound_coef(0.0, 101, 1, 0.1), 0.0)

    def test_coefficient_bound_domain(self):
        with self.assertRaises(DomainError):
            error_bound_coef(1.0, 101, 1, 0.0)


class TestLambdaMin(unittest.TestCase):

    def test_identity(self):
        bound = upper_bound_lambda_min(make_identity(8), sparse_vector(8, [2, 5]), perturbations=5)
        self.assertGreaterEqual(bound, 1.0 - 1e-6)

    def test_duplicated_identity(self):
        z = np.zeros(8)
        z[0] = 1.0
        self.assertLess(upper_bound_lambda_min(make_duplicated_identity(4), z, perturbations=5), 0.1)

    def test_zero_signal(self):
        with self.assertRaises(DomainError):
            upper_bound_lambda_min(make_identity(3), np.zeros(3))

    def test_doubled_dictionary(self):
        z = sparse_vector(8, [2, 5])
        base = upper_bound_lambda_min(make_identity(8), z, perturbations=5)
        doubled = upper_bound_lambda_min(Dictionary(2.0 * np.eye(8), "double"), z, perturbations=5)
        self.assertTrue(math.isfinite(base))
        self.assertAlmostEqual(doubled, 2.0 * base, delta=1e-4 * base)
