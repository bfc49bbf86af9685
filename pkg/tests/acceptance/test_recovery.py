import unittest

import numpy as np
from parameterized import parameterized

from synthlab.config import PresetStore, RunConfig
from synthlab.dictionaries import make_duplicated_identity, make_haar_redundant
from synthlab.experiments import SUCCESS_THRESHOLD, isotonic_increasing, run_noise_sweep, run_phase_full, run_trial, \
    transition_point
from synthlab.solvers import solve_bp_eq, solve_bp_ineq
from synthlab.synthlab import Lab, app_config_path
from tests.acceptance import SLOW
from tests.oracles import bp_eq_oracle, bp_ineq_oracle


def tiny_problem(seed, max_d=10):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, min(7, max_d)))
    d = int(rng.integers(m + 1, max_d + 1))
    return rng.standard_normal((m, d)), rng.standard_normal(m)


def desk_preset(name):
    _, text = PresetStore([app_config_path]).load(name, interactive=False)
    config = RunConfig.loads(text)
    config.apply_desk()
    return config.validate()


class TestSolverOracle(unittest.TestCase):

    @parameterized.expand([[seed] for seed in range(25)])
    def test_equality(self, seed):
        M, y = tiny_problem(seed)
        expected = bp_eq_oracle(M, y)
        self.assertAlmostEqual(solve_bp_eq(M, y).objective, expected, delta=1e-6 * max(1.0, expected))

    @parameterized.expand([[seed] for seed in range(25)])
    def test_inequality(self, seed):
        M, y = tiny_problem(1000 + seed, max_d=8)
        eta = 0.2 * float(np.linalg.norm(y))
        expected = bp_ineq_oracle(M, y, eta)
        self.assertAlmostEqual(solve_bp_ineq(M, y, eta).objective, expected, delta=1e-6 * max(1.0, expected))


class TestNonUniqueRepresenter(unittest.TestCase):

    def test_duplicated_identity(self):
        n = 8
        dictionary = make_duplicated_identity(n)
        z0 = np.zeros(2 * n)
        z0[0] = 1.0
        results = [run_trial(dictionary, z0, n, 0.0, 0, seed) for seed in range(20)]
        self.assertTrue(all(result.sig_success for result in results))
        self.assertFalse(any(result.coef_success for result in results))


@unittest.skipUnless(SLOW, "set SYNTHLAB_SLOW=1")
class TestDeskExperiments(unittest.TestCase):

    def test_phase_transition(self):
        grid = run_phase_full(make_haar_redundant(64, 3), range(2, 25), 5, master_seed=0, width_samples=100,
                              m_values=range(2, 65, 2), repetitions=5, threads=4)
        hits = 0
        for row, statdim in enumerate(grid.overlay):
            smoothed = isotonic_increasing(grid.fractions("sig")[row])
            crossing = transition_point(grid.m_values, smoothed)
            hits += crossing is not None and abs(crossing - statdim) <= 8.0
        self.assertGreaterEqual(hits, 0.8 * len(grid.s_values))

    def test_noise_robustness(self):
        config = desk_preset("haar-sig")
        lab = Lab(config)
        dictionary = lab.dictionary()
        z = lab.coefficients(dictionary)
        experiment = config.section("experiment")
        sweep = run_noise_sweep(dictionary, z, experiment["eta_values"], experiment["trials"], settings=lab.settings,
                                threads=4)
        for mean, bound in zip(sweep.mean_sig_err, sweep.bound_sig):
            self.assertIsNotNone(bound)
            self.assertLessEqual(mean, max(bound, SUCCESS_THRESHOLD))
        self.assertLessEqual(sum(sweep.violations), 0.05 * sweep.trials * len(sweep.eta_values))
