"""
The recovery experiments: phase transitions for a fixed coefficient vector and for random sparse vectors, and the
robustness of the signal estimate against measurement noise.

Random draws are keyed by (stream, row, m, trial, repetition) from the master seed, so results do not depend on the
number of worker threads.
"""
import math

import numpy as np
import scipy.optimize

from synthlab.cones import HARD_THRESHOLD, descent_generators
from synthlab.errors import DomainError, SynthlabError
from synthlab.logger import Logger, log_method_call
from synthlab.models import CoefVector, Dictionary, MeasurementEnsemble, NoiseSweep, PhaseGrid, SolverSettings, \
    TrialResult, WidthEstimate, as_coefficients
from synthlab.signals import random_coefficients
from synthlab.solvers import solve_bp_eq, solve_bp_ineq
from synthlab.utils import STREAM_MEASUREMENTS, STREAM_NOISE, STREAM_SUPPORT, STREAM_WIDTH, derive_seed, make_rng, \
    parallel_map
from synthlab.width import ENSEMBLES, STATDIM_SAMPLES, error_bound_signal, estimate_statdim, predict_m0

# Recovery counts as successful if the error stays below this threshold.
SUCCESS_THRESHOLD = 1e-5

# Inner repetitions per random coefficient vector and number of measurements.
FULL_REPETITIONS = 5

# Measurements added to the estimated statistical dimension in the noise experiment.
NOISE_MARGIN = 40


@log_method_call()
def draw_measurements(ensemble: MeasurementEnsemble) -> np.ndarray:
    """ An m x n matrix with i.i.d. standard normal or Rademacher entries. """
    if ensemble.kind not in ENSEMBLES:
        raise DomainError("Drawing measurements failed! Unknown ensemble '{}'! Expected one of {}!".format(
            ensemble.kind, ", ".join(ENSEMBLES)))
    if ensemble.m < 1 or ensemble.n < 1:
        raise DomainError("Drawing measurements failed! Expected m, n >= 1, got {}x{}!".format(ensemble.m, ensemble.n))
    rng = make_rng(ensemble.seed, STREAM_MEASUREMENTS)
    shape = (int(ensemble.m), int(ensemble.n))
    if ensemble.kind == "gaussian":
        return rng.standard_normal(shape)
    return 2.0 * rng.integers(0, 2, size=shape).astype(float) - 1.0


def noise_direction(m: int, seed: int) -> np.ndarray:
    """ A uniformly distributed unit vector in R^m. """
    e = make_rng(seed, STREAM_NOISE).standard_normal(m)
    return e / np.linalg.norm(e)


def run_trial(dictionary: Dictionary, z_ref, m: int, eta: float, noise_dir_seed: int, ens_seed: int,
              settings: SolverSettings = None, ensemble: str = "gaussian") -> TrialResult:
    """
    Measures y = A D z_ref + eta e and recovers z by min ||z||_1 s.t. ||A D z - y|| <= eta.

    A failing solver is reported through solver_converged; its estimate (the zero vector if it raised) still enters
    the errors.
    """
    z_ref = np.asarray(as_coefficients(z_ref))
    if not np.any(z_ref):
        raise DomainError("Running trial failed! Reference coefficients must be nonzero!")
    if m < 1:
        raise DomainError("Running trial failed! Expected m >= 1, got {}!".format(m))
    if eta < 0:
        raise DomainError("Running trial failed! Expected eta >= 0, got {}!".format(eta))
    A = draw_measurements(MeasurementEnsemble(ensemble, m, dictionary.n, ens_seed))
    x = dictionary.synthesize(z_ref)
    y = A @ x
    if eta > 0:
        y = y + eta * noise_direction(m, noise_dir_seed)
    try:
        solution = solve_bp_ineq(A @ dictionary.matrix, y, eta, settings)
        z_hat, converged = np.asarray(solution.z), solution.converged
    except SynthlabError as err:
        Logger.get_instance().debug("Trial with m={} and seed {} failed: {}".format(m, ens_seed, err))
        z_hat, converged = np.zeros(dictionary.d), False
    coef_err = float(np.linalg.norm(z_ref - z_hat))
    sig_err = float(np.linalg.norm(dictionary.synthesize(z_ref - z_hat)))
    return TrialResult(m, float(eta), ens_seed, coef_err, sig_err,
                       coef_err < SUCCESS_THRESHOLD, sig_err < SUCCESS_THRESHOLD, converged)


def _check_grid(m_values, trials):
    if not m_values:
        raise DomainError("Running phase transition failed! Expected at least one number of measurements!")
    if min(m_values) < 1:
        raise DomainError("Running phase transition failed! Expected m >= 1, got {}!".format(min(m_values)))
    if trials < 1:
        raise DomainError("Running phase transition failed! Expected trials >= 1, got {}!".format(trials))


def _sparsified(z):
    """ Cuts entries which are negligible relative to the largest one. """
    z = np.array(z, dtype=float)
    z[np.abs(z) <= HARD_THRESHOLD * np.max(np.abs(z), initial=0.0)] = 0.0
    return CoefVector(z)


def _log_row(label, grid: PhaseGrid, row):
    Logger.get_instance().info("{}: sig successes {}, coef successes {}, solver failures {}".format(
        label, int(np.sum(grid.success_counts_sig[row])), int(np.sum(grid.success_counts_coef[row])),
        int(np.sum(grid.solver_failures[row]))))


@log_method_call()
def run_phase_fixed(dictionary: Dictionary, z_ref, m_values, trials: int, master_seed: int = 0,
                    settings: SolverSettings = None, ensemble: str = "gaussian", threads: int = 1,
                    width_samples: int = 0, width_seed: int = 0) -> PhaseGrid:
    """
    Phase transition of noiseless recovery of the fixed coefficient vector z_ref.

    With width_samples >= 2 the statistical dimension of D * D(||.||_1; z_ref) is estimated as overlay.
    """
    m_values = [int(m) for m in m_values]
    _check_grid(m_values, trials)
    overlay = overlay_stderr = None
    if width_samples:
        estimate = estimate_statdim(descent_generators(dictionary, z_ref), width_samples, width_seed, settings,
                                    threads)
        overlay, overlay_stderr = [estimate.statdim], [estimate.stderr]
    grid = PhaseGrid(m_values, [as_coefficients(z_ref).sparsity], trials, overlay, overlay_stderr)

    def evaluate(item):
        _, m, trial = item
        return run_trial(dictionary, z_ref, m, 0.0, 0, derive_seed(master_seed, STREAM_MEASUREMENTS, 0, m, trial),
                         settings, ensemble)

    items = [(column, m, trial) for column, m in enumerate(m_values) for trial in range(trials)]
    for (column, _, _), result in zip(items, parallel_map(evaluate, items, threads)):
        grid.record(0, column, result)
    _log_row("s={}".format(grid.s_values[0]), grid, 0)
    return grid


@log_method_call()
def run_phase_full(dictionary: Dictionary, s_values, trials: int, master_seed: int = 0,
                   settings: SolverSettings = None, width_samples: int = STATDIM_SAMPLES, width_seed: int = 0,
                   m_values=None, repetitions: int = FULL_REPETITIONS, ensemble: str = "gaussian",
                   threads: int = 1) -> PhaseGrid:
    """
    Phase transition over the sparsity of random coefficient vectors.

    For every sparsity s and trial a random s-sparse z0 is drawn, a minimal l1-representer z of D z0 is computed and
    recovery of z is repeated `repetitions` times for every number of measurements. The overlay is the mean estimated
    statistical dimension of D * D(||.||_1; z) per sparsity.
    """
    s_values = [int(s) for s in s_values]
    m_values = list(range(1, dictionary.n + 1)) if m_values is None else [int(m) for m in m_values]
    _check_grid(m_values, trials)
    if not s_values or min(s_values) < 1 or max(s_values) > dictionary.d:
        raise DomainError("Running phase transition failed! Expected sparsities in [1, {}]!".format(dictionary.d))
    if repetitions < 1:
        raise DomainError("Running phase transition failed! Expected repetitions >= 1, got {}!".format(repetitions))
    logger = Logger.get_instance()
    grid = PhaseGrid(m_values, s_values, trials * repetitions)
    overlay, overlay_stderr = [], []

    for row, s in enumerate(s_values):
        references, estimates = [], []
        for trial in range(trials):
            z0 = random_coefficients(dictionary, s, derive_seed(master_seed, STREAM_SUPPORT, row, trial))
            solution = solve_bp_eq(dictionary.matrix, dictionary.synthesize(z0), settings)
            if not solution.converged:
                logger.warning("Minimal representer for s={} and trial {} did not converge.".format(s, trial))
            z = _sparsified(solution.z)
            references.append(z)
            estimates.append(estimate_statdim(descent_generators(dictionary, z), width_samples,
                                              derive_seed(width_seed, STREAM_WIDTH, row, trial), settings, threads))
        overlay.append(float(np.mean([estimate.statdim for estimate in estimates])))
        overlay_stderr.append(math.sqrt(sum(estimate.stderr ** 2 for estimate in estimates)) / trials)

        def evaluate(item):
            _, m, trial, repetition = item
            ens_seed = derive_seed(master_seed, STREAM_MEASUREMENTS, row, m, trial, repetition)
            return run_trial(dictionary, references[trial], m, 0.0, 0, ens_seed, settings, ensemble)

        items = [(column, m, trial, repetition) for column, m in enumerate(m_values) for trial in range(trials)
                 for repetition in range(repetitions)]
        for (column, _, _, _), result in zip(items, parallel_map(evaluate, items, threads)):
            grid.record(row, column, result)
        _log_row("s={} (statdim {:.2f})".format(s, overlay[-1]), grid, row)

    grid.overlay, grid.overlay_stderr = overlay, overlay_stderr
    return grid


@log_method_call()
def run_noise_sweep(dictionary: Dictionary, z_ref, eta_values, trials: int, master_seed: int = 0,
                    settings: SolverSettings = None, m: int = None, width: WidthEstimate = None,
                    width_samples: int = STATDIM_SAMPLES, width_seed: int = 0, ensemble: str = "gaussian",
                    u: float = 0.0, c_const: float = 1.0, gamma: float = 1.0, threads: int = 1) -> NoiseSweep:
    """
    Mean coefficient and signal errors of noisy recovery for every noise level.

    The width defaults to the estimated statistical dimension of D * D(||.||_1; z_ref) and m to ceil(width) + 40. The
    signal error bound is reported whenever m exceeds the predicted m0; violations count the trials above it.
    """
    eta_values = [float(eta) for eta in eta_values]
    if not eta_values or min(eta_values) < 0:
        raise DomainError("Running noise sweep failed! Expected a non-empty list of noise levels >= 0!")
    if trials < 1:
        raise DomainError("Running noise sweep failed! Expected trials >= 1, got {}!".format(trials))
    if width is None:
        width = estimate_statdim(descent_generators(dictionary, z_ref), width_samples, width_seed, settings, threads)
    if m is None:
        m = int(math.ceil(width.statdim)) + NOISE_MARGIN
    if m < 1:
        raise DomainError("Running noise sweep failed! Expected m >= 1, got {}!".format(m))
    prediction = predict_m0(width, u, ensemble, c_const, gamma)
    logger = Logger.get_instance()
    logger.info("Noise sweep with m={} measurements (m0={:.2f}).".format(m, prediction.m0))

    mean_coef, mean_sig, bounds, violations, failures = [], [], [], [], []
    for row, eta in enumerate(eta_values):
        def evaluate(trial):
            return run_trial(dictionary, z_ref, m, eta, derive_seed(master_seed, STREAM_NOISE, row, trial),
                             derive_seed(master_seed, STREAM_MEASUREMENTS, row, m, trial), settings, ensemble)

        results = parallel_map(evaluate, range(trials), threads)
        bound = error_bound_signal(eta, m, prediction.m0) if m > prediction.m0 else None
        mean_coef.append(float(np.mean([result.coef_err for result in results])))
        mean_sig.append(float(np.mean([result.sig_err for result in results])))
        bounds.append(bound)
        tolerance = None if bound is None else max(bound, SUCCESS_THRESHOLD)
        violations.append(0 if bound is None else sum(result.sig_err > tolerance for result in results))
        failures.append(sum(not result.solver_converged for result in results))
        logger.info("eta={:g}: mean sig error {:.3g}, mean coef error {:.3g}".format(eta, mean_sig[-1], mean_coef[-1]))
    return NoiseSweep(eta_values, mean_coef, mean_sig, bounds, m, prediction.m0, trials, violations, failures)


def isotonic_increasing(values, weights=None) -> np.ndarray:
    """ The non-decreasing weighted least squares fit to values. """
    values = np.asarray(values, dtype=float)
    weights = np.ones_like(values) if weights is None else np.asarray(weights, dtype=float)
    if values.shape != weights.shape or values.ndim != 1:
        raise DomainError("Smoothing failed! Expected matching one-dimensional values and weights!")
    if np.any(weights <= 0):
        raise DomainError("Smoothing failed! Expected positive weights!")
    if values.size == 0:
        return values.copy()
    return scipy.optimize.isotonic_regression(values, weights=weights, increasing=True).x


def transition_point(m_values, fractions, level: float = 0.5):
    """
    The number of measurements at which the isotonic fit of the success fractions reaches level.

    Interpolates linearly between grid points. Returns None if the level is never reached.
    """
    m_values = np.asarray(m_values, dtype=float)
    smoothed = isotonic_increasing(fractions)
    above = np.flatnonzero(smoothed >= level)
    if above.size == 0:
        return None
    index = int(above[0])
    if index == 0:
        return float(m_values[0])
    low, high = smoothed[index - 1], smoothed[index]
    share = (level - low) / (high - low)
    return float(m_values[index - 1] + share * (m_values[index] - m_values[index - 1]))
