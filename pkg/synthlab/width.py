"""
Monte-Carlo statistical dimension, mean width of polytopes, sampling-rate predictions and recovery error bounds.
"""
import math

import numpy as np

from synthlab.errors import ConvergenceError, DomainError, ProjectionError, SynthlabError
from synthlab.logger import Logger, log_method_call
from synthlab.models import ConeDecomposition, Dictionary, PolyhedralCone, SamplingPrediction, SolverSettings, \
    WidthEstimate, as_coefficients
from synthlab.solvers import project_cone, solve_bp_ineq
from synthlab.utils import STREAM_NOISE, STREAM_WIDTH, make_rng, parallel_map

STATDIM_SAMPLES = 300

LAMBDA_PERTURBATIONS = 20

# Noise level of the lambda_min heuristic relative to ||D z||.
LAMBDA_SCALE = 1e-3

ENSEMBLES = ("gaussian", "rademacher")


def gaussian_sample(n: int, seed: int, index: int) -> np.ndarray:
    """ The index-th standard Gaussian sample of the width stream; independent of evaluation order. """
    return make_rng(seed, STREAM_WIDTH, index).standard_normal(n)


def _squared_projections(cone: PolyhedralCone, samples, seed, settings, threads, transform=None):
    def evaluate(index):
        g = gaussian_sample(cone.n, seed, index)
        if transform is not None:
            g = transform(g)
        try:
            projection = project_cone(cone, g, settings)
        except ConvergenceError as err:
            raise ProjectionError("Estimating statistical dimension failed! Projection of sample {} failed!".format(
                index), index, best=err.best, report=err.report)
        return float(projection @ projection)

    return np.array(parallel_map(evaluate, range(samples), threads))


def _estimate(values, offset, samples, seed):
    stderr = float(np.std(values, ddof=1) / math.sqrt(samples))
    return WidthEstimate(offset + float(np.mean(values)), stderr, samples, seed)


@log_method_call()
def estimate_statdim(cone: PolyhedralCone, samples: int = STATDIM_SAMPLES, seed: int = 0,
                     settings: SolverSettings = None, threads: int = 1) -> WidthEstimate:
    """
    Estimates the statistical dimension E ||P_C(g)||^2 as the sample mean over Gaussian draws.

    The result is bit-for-bit reproducible given (cone, samples, seed), independent of threads.

    :raises ProjectionError: if a projection fails; carries the sample index.
    """
    if samples < 2:
        raise DomainError("Estimating statistical dimension failed! Expected samples >= 2, got {}!".format(samples))
    values = _squared_projections(cone, samples, seed, settings, threads)
    return _estimate(values, 0.0, samples, seed)


@log_method_call()
def estimate_statdim_decomposed(decomposition: ConeDecomposition, samples: int = STATDIM_SAMPLES, seed: int = 0,
                                settings: SolverSettings = None, threads: int = 1) -> WidthEstimate:
    """
    Estimates delta(C_L (+) C_R) = dim C_L + delta(C_R) where only the range part is sampled (on the complement of
    the lineality space), so the standard error stems from the range alone.
    """
    if samples < 2:
        raise DomainError("Estimating statistical dimension failed! Expected samples >= 2, got {}!".format(samples))
    lineality = float(decomposition.lineality_dim)
    if decomposition.range_cone is None:
        return WidthEstimate(lineality, 0.0, samples, seed)
    values = _squared_projections(decomposition.range_cone, samples, seed, settings, threads,
                                  transform=decomposition.project_complement)
    return _estimate(values, lineality, samples, seed)


def estimate_mean_width(vertices, samples: int = 2000, seed: int = 0):
    """
    Estimates the mean width E max_i <g, x_i> of the convex hull of the columns of vertices.

    :return: a tuple (mean, stderr).
    """
    vertices = np.asarray(vertices, dtype=float)
    if samples < 2:
        raise DomainError("Estimating mean width failed! Expected samples >= 2, got {}!".format(samples))
    g = make_rng(seed, STREAM_WIDTH).standard_normal((samples, vertices.shape[0]))
    maxima = np.max(g @ vertices, axis=1)
    return float(np.mean(maxima)), float(np.std(maxima, ddof=1) / math.sqrt(samples))


def sparse_descent_width_bound(s: int, d: int) -> float:
    """ The bound 2 s log(d / s) + 2 s on the squared conic width of the l1 descent cone at an s-sparse vector. """
    if not 1 <= s <= d:
        raise DomainError("Evaluating sparse width bound failed! Expected 1 <= s <= d, got s={}, d={}!".format(s, d))
    return 2.0 * s * math.log(d / s) + 2.0 * s


def predict_m0(width, u: float = 0.0, ensemble: str = "gaussian", c_const: float = 1.0,
               gamma: float = 1.0) -> SamplingPrediction:
    """
    The number of measurements m0 = c^2 gamma^4 (w + u)^2 + 1 above which recovery succeeds with probability
    1 - exp(-u^2 / 2).

    width is either a WidthEstimate, whose statistical dimension is used for w^2 (an upper bound of the squared
    conic width), or the squared width itself. Gaussian measurements have c = gamma = 1.
    """
    if u < 0:
        raise DomainError("Predicting sampling rate failed! Expected u >= 0, got {}!".format(u))
    if ensemble not in ENSEMBLES:
        raise DomainError("Predicting sampling rate failed! Unknown ensemble '{}'!".format(ensemble))
    width_sq = width.statdim if isinstance(width, WidthEstimate) else float(width)
    width_sq = max(0.0, width_sq)
    if ensemble == "gaussian":
        c_const, gamma = 1.0, 1.0
    m0 = c_const ** 2 * gamma ** 4 * (math.sqrt(width_sq) + u) ** 2 + 1.0
    return SamplingPrediction(m0, width_sq, u, c_const, gamma)


def error_bound_signal(eta: float, m: float, m0: float) -> float:
    """ The bound 2 eta / (sqrt(m - 1) - sqrt(m0 - 1)) on the signal recovery error. """
    if eta < 0:
        raise DomainError("Evaluating error bound failed! Expected eta >= 0, got {}!".format(eta))
    if m0 < 1 or not m > m0:
        raise DomainError("Evaluating error bound failed! Bound vacuous for m={} and m0={}!".format(m, m0))
    return 2.0 * eta / (math.sqrt(m - 1.0) - math.sqrt(m0 - 1.0))


def error_bound_coef(eta: float, m: float, m0: float, lambda_min: float) -> float:
    """ The coefficient error bound, i.e. the signal error bound divided by lambda_min. """
    if not lambda_min > 0:
        raise DomainError("Evaluating error bound failed! Expected lambda_min > 0, got {}!".format(lambda_min))
    return error_bound_signal(eta, m, m0) / lambda_min


@log_method_call()
def upper_bound_lambda_min(dictionary: Dictionary, z, perturbations: int = LAMBDA_PERTURBATIONS, seed: int = 0,
                           settings: SolverSettings = None, scale: float = LAMBDA_SCALE) -> float:
    """
    Upper bound on the minimum conic singular value of D on the descent cone of ||.||_1 at z.

    For random perturbations e with ||e|| = eta (eta = scale * ||D z||) it solves min ||w||_1 s.t.
    ||(D z + e) - D w|| <= eta and records 2 eta / ||z - w||. Returns the smallest value, or +inf if every solution
    coincides with z.

    :raises ConvergenceError: if every solve failed.
    """
    settings = settings or SolverSettings()
    logger = Logger.get_instance()
    z = np.asarray(as_coefficients(z))
    x = dictionary.synthesize(z)
    eta = scale * float(np.linalg.norm(x))
    if eta == 0.0:
        raise DomainError("Bounding lambda_min failed! D z must be nonzero!")
    tolerance = 10.0 * settings.feas_tol * max(1.0, float(np.linalg.norm(z)))

    bound = math.inf
    failures = 0
    for index in range(perturbations):
        e = make_rng(seed, STREAM_NOISE, index).standard_normal(dictionary.n)
        e *= eta / np.linalg.norm(e)
        try:
            solution = solve_bp_ineq(dictionary.matrix, x + e, eta, settings)
        except SynthlabError as err:
            logger.warning("Skipping perturbation {}: {}".format(index, err))
            failures += 1
            continue
        if not solution.converged:
            logger.warning("Skipping perturbation {}: solver did not converge!".format(index))
            failures += 1
            continue
        distance = float(np.linalg.norm(z - np.asarray(solution.z)))
        if distance >= tolerance:
            bound = min(bound, 2.0 * eta / distance)
    if perturbations > 0 and failures == perturbations:
        raise ConvergenceError("Bounding lambda_min failed! All {} perturbed solves failed!".format(perturbations),
                               report={"failures": failures})
    return bound
