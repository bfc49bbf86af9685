import unittest

import numpy as np
from parameterized import parameterized

from synthlab.dictionaries import make_conv_pair, make_gaussian, make_haar_redundant, make_identity, make_tv_pinv
from synthlab.errors import DomainError
from synthlab.signals import block_coefficients, build_coefficients, conv_example_coefficients, jump_coefficients, \
    jump_signal, omp_coefficients, piecewise_smooth_signal, random_coefficients, spike_coefficients


class TestSignals(unittest.TestCase):

    ####################################################################################################################
    # Random
    ####################################################################################################################

    def test_random_sparsity(self):
        z = random_coefficients(make_identity(32), 5, seed=3)
        self.assertEqual(z.sparsity, 5)
        self.assertEqual(len(z), 32)

    def test_random_deterministic(self):
        dictionary = make_gaussian(8, 20, 0)
        self.assertEqual(random_coefficients(dictionary, 4, 7), random_coefficients(dictionary, 4, 7))
        self.assertNotEqual(random_coefficients(dictionary, 4, 7), random_coefficients(dictionary, 4, 8))

    @parameterized.expand([[0], [33]])
    def test_random_invalid_sparsity(self, s):
        with self.assertRaises(DomainError):
            random_coefficients(make_identity(32), s)

    ####################################################################################################################
    # Blocks
    ####################################################################################################################

    def test_blocks_haar_default(self):
        z = block_coefficients(make_haar_redundant(64, 3), 6, seed=1)
        np.testing.assert_array_equal(z.support, [200, 201, 202, 232, 233, 234])

    def test_blocks_odd_sparsity(self):
        z = block_coefficients(make_identity(40), 5, offset=2, spacing=10)
        np.testing.assert_array_equal(z.support, [2, 3, 4, 12, 13])

    def test_blocks_overlap(self):
        with self.assertRaises(DomainError):
            block_coefficients(make_identity(40), 6, offset=0, spacing=2)

    def test_blocks_overflow(self):
        with self.assertRaises(DomainError):
            block_coefficients(make_identity(40), 6, offset=30, spacing=10)

    ####################################################################################################################
    # Spikes
    ####################################################################################################################

    def test_spikes(self):
        z = spike_coefficients(make_identity(8), [3, 4], [1.0, -1.0])
        np.testing.assert_array_equal(np.asarray(z), [0, 0, 0, 1, -1, 0, 0, 0])

    @parameterized.expand([
        [[3, 3], [1.0, 2.0]],
        [[3], [1.0, 2.0]],
        [[], []],
        [[8], [1.0]],
        [[-1], [1.0]],
    ])
    def test_spikes_invalid(self, indices, values):
        with self.assertRaises(DomainError):
            spike_coefficients(make_identity(8), indices, values)

    ####################################################################################################################
    # Jumps
    ####################################################################################################################

    def test_jump_signal(self):
        x = jump_signal(20, 4)
        self.assertAlmostEqual(float(np.mean(x)), 0.0)
        np.testing.assert_array_equal(np.flatnonzero(np.diff(x)), [3, 7, 11, 15])

    def test_jump_signal_too_short(self):
        with self.assertRaises(DomainError):
            jump_signal(9, 4)

    @parameterized.expand([[32], [64], [100]])
    def test_jump_coefficients(self, n):
        dictionary = make_tv_pinv(n)
        z = jump_coefficients(dictionary, 4)
        self.assertEqual(z.sparsity, 4)
        np.testing.assert_allclose(dictionary.synthesize(z), jump_signal(n, 4), atol=1e-10)

    def test_jump_coefficients_wrong_dictionary(self):
        with self.assertRaises(DomainError):
            jump_coefficients(make_identity(16))

    ####################################################################################################################
    # Convolutional pair
    ####################################################################################################################

    def test_conv_example(self):
        n = 8
        dictionary = make_conv_pair(n)
        z = conv_example_coefficients(dictionary, 2.0, 1.0)
        np.testing.assert_array_equal(z.support, [0, 1, n, n + 1])
        expected = np.zeros(n)
        expected[0], expected[n - 1] = 2.0, 1.0
        np.testing.assert_allclose(dictionary.synthesize(z), expected, atol=1e-15)

    @parameterized.expand([
        [1.0, 2.0],
        [1.0, 1.0],
        [2.0, 0.0],
    ])
    def test_conv_example_invalid(self, x1, xn):
        with self.assertRaises(DomainError):
            conv_example_coefficients(make_conv_pair(8), x1, xn)

    ####################################################################################################################
    # OMP and builders
    ####################################################################################################################

    def test_omp_coefficients(self):
        dictionary = make_haar_redundant(32, 3)
        z = omp_coefficients(dictionary, 6)
        self.assertLessEqual(z.sparsity, 6)
        x = piecewise_smooth_signal(32)
        self.assertLess(np.linalg.norm(x - dictionary.synthesize(z)), np.linalg.norm(x))

    def test_build_coefficients(self):
        dictionary = make_identity(40)
        z = build_coefficients("blocks", dictionary, s=4, seed=0, offset=None, spacing=None, jumps=3)
        self.assertEqual(z, block_coefficients(dictionary, 4, 0))

    def test_build_unknown_recipe(self):
        with self.assertRaises(DomainError):
            build_coefficients("wavelets", make_identity(4), s=2)
