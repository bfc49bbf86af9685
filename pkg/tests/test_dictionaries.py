import math
import unittest

import numpy as np
from parameterized import parameterized

from synthlab.dictionaries import build_dictionary, coherence, forward_differences, make_conv_pair, \
    make_duplicated_identity, make_gaussian, make_haar_redundant, make_identity, make_superres, make_tv_pinv, \
    normalize_atoms, omp
from synthlab.errors import ConstructionError, DomainError
from synthlab.models import Dictionary
from tests.oracles import coherence_oracle


def is_circular_shift(a, b):
    return any(np.allclose(np.roll(a, shift), b) for shift in range(a.shape[0]))


class TestDictionaries(unittest.TestCase):

    ####################################################################################################################
    # Identity
    ####################################################################################################################

    def test_identity(self):
        dictionary = make_identity(3)
        np.testing.assert_array_equal(dictionary.matrix, np.eye(3))
        np.testing.assert_array_equal(dictionary.atom_norms, [1, 1, 1])
        self.assertEqual(dictionary.label, "identity")

    def test_identity_single_entry(self):
        np.testing.assert_array_equal(make_identity(1).matrix, [[1.0]])

    def test_identity_invalid_dimension(self):
        with self.assertRaises(ConstructionError):
            make_identity(0)

    def test_duplicated_identity(self):
        dictionary = make_duplicated_identity(4)
        self.assertEqual(dictionary.shape, (4, 8))
        np.testing.assert_array_equal(dictionary.matrix[:, :4], dictionary.matrix[:, 4:])

    ####################################################################################################################
    # Gaussian
    ####################################################################################################################

    def test_gaussian_shape(self):
        self.assertEqual(make_gaussian(256, 512, 0).shape, (256, 512))

    def test_gaussian_deterministic(self):
        np.testing.assert_array_equal(make_gaussian(16, 32, 5).matrix, make_gaussian(16, 32, 5).matrix)
        self.assertFalse(np.array_equal(make_gaussian(16, 32, 5).matrix, make_gaussian(16, 32, 6).matrix))

    def test_gaussian_column_norms(self):
        mean = float(np.mean(make_gaussian(64, 128, 0).atom_norms))
        self.assertTrue(6.5 <= mean <= 9.5)

    ####################################################################################################################
    # Haar
    ####################################################################################################################

    @parameterized.expand([
        [256, 3, 1024],
        [64, 3, 256],
        [8, 2, 24],
        [2, 1, 4],
    ])
    def test_haar_atom_count(self, n, levels, d):
        dictionary = make_haar_redundant(n, levels)
        self.assertEqual(dictionary.shape, (n, d))
        np.testing.assert_allclose(dictionary.atom_norms, 1.0, atol=1e-12)

    def test_haar_two_point(self):
        dictionary = make_haar_redundant(2, 1)
        np.testing.assert_allclose(np.abs(dictionary.matrix), 1.0 / math.sqrt(2.0))
        np.testing.assert_allclose(dictionary.matrix[:, 2:], 1.0 / math.sqrt(2.0))
        self.assertAlmostEqual(float(np.sum(dictionary.matrix[:, 0])), 0.0)

    def test_haar_row_energy(self):
        gram = make_haar_redundant(8, 2).matrix @ make_haar_redundant(8, 2).matrix.T
        np.testing.assert_allclose(np.diag(gram), gram[0, 0])

    @parameterized.expand([
        [12, 2],
        [16, 5],
        [16, 0],
    ])
    def test_haar_invalid(self, n, levels):
        with self.assertRaises(ConstructionError):
            make_haar_redundant(n, levels)

    ####################################################################################################################
    # Convolution pair
    ####################################################################################################################

    def test_conv_pair_four_points(self):
        expected = np.array([
            [1, 1, 0, 0, 1, -1, 0, 0],
            [0, 1, 1, 0, 0, 1, -1, 0],
            [0, 0, 1, 1, 0, 0, 1, -1],
            [1, 0, 0, 1, -1, 0, 0, 1],
        ], dtype=float)
        np.testing.assert_array_equal(make_conv_pair(4).matrix, expected)

    @parameterized.expand([[3], [8], [17]])
    def test_conv_pair_column_norms(self, n):
        np.testing.assert_allclose(make_conv_pair(n).atom_norms, math.sqrt(2.0))

    @parameterized.expand([[4], [8]])
    def test_conv_pair_coherence(self, n):
        dictionary = make_conv_pair(n)
        self.assertAlmostEqual(coherence(dictionary), coherence_oracle(dictionary.matrix), places=12)

    ####################################################################################################################
    # Super-resolution
    ####################################################################################################################

    def test_superres_shape(self):
        self.assertEqual(make_superres(256).shape, (256, 256))

    def test_superres_delta_kernel(self):
        np.testing.assert_allclose(make_superres(16, 1e-6).matrix, np.eye(16), atol=1e-12)

    def test_superres_circulant(self):
        matrix = make_superres(32, 3.0).matrix
        for j in range(1, 32):
            self.assertTrue(is_circular_shift(matrix[:, 0], matrix[:, j]))

    def test_superres_normalized(self):
        dictionary = make_superres(32, 3.0, normalize=True)
        self.assertEqual(dictionary.label, "superres/unit")
        np.testing.assert_allclose(dictionary.atom_norms, 1.0, atol=1e-12)

    def test_superres_invalid_sigma(self):
        with self.assertRaises(ConstructionError):
            make_superres(16, 0.0)

    ####################################################################################################################
    # Total variation
    ####################################################################################################################

    def test_tv_pinv_three_points(self):
        gradient = forward_differences(3)
        np.testing.assert_array_equal(gradient, [[-1, 1, 0], [0, -1, 1]])
        np.testing.assert_allclose(gradient @ make_tv_pinv(3).matrix, np.eye(2), atol=1e-10)

    @parameterized.expand([[3], [16], [500]])
    def test_tv_pinv_zero_mean_atoms(self, n):
        dictionary = make_tv_pinv(n)
        self.assertEqual(dictionary.shape, (n, n - 1))
        np.testing.assert_allclose(np.sum(dictionary.matrix, axis=0), 0.0, atol=1e-10)

    ####################################################################################################################
    # Coherence
    ####################################################################################################################

    def test_coherence_identity(self):
        self.assertEqual(coherence(make_identity(5)), 0.0)

    def test_coherence_duplicated_column(self):
        self.assertAlmostEqual(coherence(make_duplicated_identity(3)), 1.0)

    def test_coherence_gaussian(self):
        matrix = make_gaussian(6, 9, 3).matrix
        self.assertAlmostEqual(coherence(matrix), coherence_oracle(matrix), places=12)

    def test_coherence_single_atom(self):
        with self.assertRaises(DomainError):
            coherence(np.ones((3, 1)))

    ####################################################################################################################
    # Normalization and builders
    ####################################################################################################################

    def test_normalize_atoms(self):
        dictionary = normalize_atoms(make_gaussian(8, 12, 1))
        self.assertEqual(dictionary.label, "gaussian/unit")
        self.assertTrue(dictionary.declares_unit_norm)
        np.testing.assert_allclose(dictionary.atom_norms, 1.0, atol=1e-12)

    def test_normalize_unit_norm_dictionary(self):
        dictionary = make_identity(4)
        self.assertIs(normalize_atoms(dictionary), dictionary)

    def test_declared_unit_norm_is_checked(self):
        with self.assertRaises(ConstructionError):
            Dictionary(2.0 * np.eye(3), "identity")

    def test_label_separator(self):
        with self.assertRaises(ConstructionError):
            Dictionary(np.eye(2), "a,b")

    def test_build_dictionary(self):
        dictionary = build_dictionary("haar", n=16, levels=2, d=999, sigma=1.0)
        self.assertEqual(dictionary.shape, (16, 48))
        self.assertEqual(build_dictionary("gaussian", normalize=True, n=4, d=6, seed=0).label, "gaussian/unit")

    def test_build_unknown_dictionary(self):
        with self.assertRaises(ConstructionError):
            build_dictionary("wavelet", n=16)

    ####################################################################################################################
    # Orthogonal matching pursuit
    ####################################################################################################################

    def test_omp_identity(self):
        x = np.zeros(10)
        x[[1, 4, 7]] = [3.0, -1.0, 0.5]
        np.testing.assert_allclose(np.asarray(omp(make_identity(10), x, 3)), x)

    def test_omp_single_atom(self):
        dictionary = normalize_atoms(make_gaussian(8, 16, 0))
        z = omp(dictionary, dictionary.matrix[:, 5], 1)
        np.testing.assert_array_equal(z.support, [5])
        self.assertAlmostEqual(float(np.asarray(z)[5]), 1.0)

    def test_omp_monotone_residuals(self):
        dictionary = make_gaussian(8, 16, 2)
        z0 = np.zeros(16)
        z0[[3, 11]] = [1.0, -2.0]
        _, residuals = omp(dictionary, dictionary.synthesize(z0), 8, return_path=True)
        self.assertTrue(all(later <= earlier + 1e-12 for earlier, later in zip(residuals, residuals[1:])))

    def test_omp_tolerance(self):
        dictionary = make_gaussian(8, 16, 2)
        x = dictionary.matrix[:, 0] + dictionary.matrix[:, 1]
        z = omp(dictionary, x, 16, tol=1e-8)
        self.assertLessEqual(np.linalg.norm(x - dictionary.synthesize(z)), 1e-8)

    @parameterized.expand([[0], [17]])
    def test_omp_invalid_sparsity(self, s_max):
        dictionary = make_gaussian(8, 16, 2)
        with self.assertRaises(DomainError):
            omp(dictionary, np.ones(8), s_max)
