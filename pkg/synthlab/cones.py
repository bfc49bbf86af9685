"""
Transformed descent cones D * D(||.||_1; z) of the l1-synthesis gauge, their decomposition into lineality space and
range, and the analytic width and sampling-rate bounds derived from the circumangle.
"""
import math

import numpy as np

from synthlab.errors import DomainError, InconsistencyError
from synthlab.logger import Logger, log_method_call
from synthlab.models import CoefVector, ConeDecomposition, Dictionary, PolyhedralCone, SolverSettings, \
    as_coefficients, as_signal
from synthlab.solvers import circumcenter, perturbation_direction, solve_bp_eq

# Tolerance relative to the largest column norm for numerical rank decisions of the lineality space.
RANK_TOLERANCE = 1e-10

# Projected range generators with a relative norm below this tolerance are dropped.
ZERO_GENERATOR_TOLERANCE = 1e-10

# Entries below SIGN_TOLERANCE * ||z||_inf count as zero when taking signs.
SIGN_TOLERANCE = 1e-12

# Number of antithetic perturbation pairs used to find a relative interior representer.
REPRESENTER_PAIRS = 5

# Entries of perturbed solutions below this fraction of their largest entry are cut before averaging.
HARD_THRESHOLD = 1e-9

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _signs_and_support(dictionary: Dictionary, z):
    z = as_coefficients(z)
    if len(z) != dictionary.d:
        raise DomainError("Building descent cone failed! Coefficient vector has length {}, expected {}!".format(
            len(z), dictionary.d))
    signs = z.signs(SIGN_TOLERANCE)
    support = np.flatnonzero(signs)
    if support.size == 0:
        raise DomainError("Building descent cone failed! Coefficient vector must be nonzero!")
    return signs, support


@log_method_call()
def descent_generators(dictionary: Dictionary, z) -> PolyhedralCone:
    """
    Generators of D * D(||.||_1; z): the vectors +s d_i - v and -s d_i - v for every atom d_i, where s = |supp z| and
    v = D sign(z). Generators which vanish are dropped, so there are at most 2d.
    """
    signs, support = _signs_and_support(dictionary, z)
    s = support.size
    v = dictionary.matrix @ signs
    generators = np.hstack([s * dictionary.matrix - v[:, None], -s * dictionary.matrix - v[:, None]])
    norms = np.linalg.norm(generators, axis=0)
    scale = max(1.0, float(np.max(norms)))
    keep = norms > ZERO_GENERATOR_TOLERANCE * scale
    if not np.all(keep):
        Logger.get_instance().debug("Dropped {} vanishing descent generators.".format(int(np.sum(~keep))))
    return PolyhedralCone(generators[:, keep], label="descent:" + dictionary.label)


def orthonormalize(vectors, tolerance=RANK_TOLERANCE):
    """
    Modified Gram-Schmidt. Columns whose remainder falls below tolerance * (largest column norm) are rejected.

    :return: a matrix with orthonormal columns spanning the columns of vectors.
    """
    vectors = np.asarray(vectors, dtype=float)
    n = vectors.shape[0]
    if vectors.shape[1] == 0:
        return np.zeros((n, 0))
    threshold = tolerance * float(np.max(np.linalg.norm(vectors, axis=0)))
    basis = []
    for column in vectors.T:
        remainder = column.copy()
        for q in basis:
            remainder -= (q @ remainder) * q
        # Reorthogonalize once.
        for q in basis:
            remainder -= (q @ remainder) * q
        norm = float(np.linalg.norm(remainder))
        if norm > threshold:
            basis.append(remainder / norm)
    Logger.get_instance().debug("Numerical rank {} of {} spanning vectors (threshold {:.3g}).".format(
        len(basis), vectors.shape[1], threshold))
    return np.column_stack(basis) if basis else np.zeros((n, 0))


@log_method_call()
def lineality_decompose(dictionary: Dictionary, z, settings: SolverSettings = None,
                        with_circumcenter=True) -> ConeDecomposition:
    """
    Decomposes the descent cone at a maximal support representer z into C = C_L (+) C_R.

    C_L = span(s sign(z_i) d_i - v : i in supp z) with v = D sign(z). C_R is generated by the projections of
    +s d_j - v and -s d_j - v (j outside the support) onto the orthogonal complement of C_L.
    """
    settings = settings or SolverSettings()
    signs, support = _signs_and_support(dictionary, z)
    s_bar = support.size
    if s_bar >= dictionary.d:
        raise DomainError("Decomposing descent cone failed! Range is empty since the support covers all atoms!")
    matrix = dictionary.matrix
    v = matrix @ signs
    if np.linalg.norm(matrix @ np.asarray(as_coefficients(z))) == 0.0:
        raise DomainError("Decomposing descent cone failed! D z must be nonzero!")

    spanning = s_bar * matrix[:, support] * signs[support] - v[:, None]
    basis = orthonormalize(spanning)

    off_support = np.setdiff1d(np.arange(dictionary.d), support)
    raw = np.hstack([s_bar * matrix[:, off_support] - v[:, None], -s_bar * matrix[:, off_support] - v[:, None]])
    projected = raw - basis @ (basis.T @ raw) if basis.shape[1] else raw
    raw_norms = np.linalg.norm(raw, axis=0)
    keep = np.linalg.norm(projected, axis=0) > ZERO_GENERATOR_TOLERANCE * np.maximum(raw_norms, 1.0)
    if not np.all(keep):
        Logger.get_instance().debug("Dropped {} range generators with vanishing projection.".format(
            int(np.sum(~keep))))
    range_cone = PolyhedralCone(projected[:, keep], label="range:" + dictionary.label) if np.any(keep) else None
    decomposition = ConeDecomposition(basis, range_cone, n=dictionary.n)
    if with_circumcenter and range_cone is not None:
        theta, alpha = circumcenter(range_cone, settings)
        decomposition = decomposition.with_circumcenter(theta, alpha)
    return decomposition


@log_method_call()
def maximal_representer(dictionary: Dictionary, x0, settings: SolverSettings = None,
                        pairs: int = REPRESENTER_PAIRS) -> CoefVector:
    """
    A minimal l1-representer of x0 in the relative interior of the solution set, i.e. with maximal support.

    Solves min ||z||_1 + <p, z> s.t. D z = x0 for antithetic pairs of tiny random perturbations p, averages the
    (hard-thresholded) solutions and confirms that the average is still optimal for the unperturbed program.

    :raises InconsistencyError: if the averaged representer is not optimal within opt_tol.
    """
    settings = settings or SolverSettings()
    logger = Logger.get_instance()
    x0 = np.asarray(as_signal(x0))
    if np.linalg.norm(x0) == 0.0:
        raise DomainError("Computing maximal representer failed! Signal must be nonzero!")

    optimum = solve_bp_eq(dictionary.matrix, x0, settings).objective
    solutions = []
    for key in range(1, pairs + 1):
        perturbation = perturbation_direction(dictionary.d, settings, key, scale=optimum)
        for linear in (perturbation, -perturbation):
            z = np.array(solve_bp_eq(dictionary.matrix, x0, settings, linear=linear).z, dtype=float)
            z[np.abs(z) <= HARD_THRESHOLD * np.max(np.abs(z), initial=0.0)] = 0.0
            solutions.append(z)
    solutions = np.array(solutions)
    signs = np.sign(solutions)
    if np.any(np.max(signs, axis=0) * np.min(signs, axis=0) < 0):
        logger.warning("Perturbed representers disagree in sign; averaging anyway.")
    average = solutions.mean(axis=0)

    drift = abs(float(np.sum(np.abs(average))) - optimum)
    if drift > settings.opt_tol * max(1.0, optimum):
        raise InconsistencyError("Computing maximal representer failed! Objective drift {:.3g} exceeds {:.3g}!".format(
            drift, settings.opt_tol))
    logger.debug("Maximal representer has support size {}.".format(int(np.count_nonzero(average))))
    return CoefVector(average)


def _check_angle(alpha):
    if not 0.0 <= alpha < math.pi / 2:
        raise DomainError("Evaluating bound failed! Expected alpha in [0, pi/2), got {}!".format(alpha))


def polytope_width_bound(k: int) -> float:
    """ Bound sqrt(2 log(k / sqrt(2 pi))) + 1 / sqrt(2 log(k / sqrt(2 pi))) on the mean width of k points in B_2. """
    if k < 5:
        raise DomainError("Evaluating polytope width bound failed! Expected k >= 5, got {}!".format(k))
    root = math.sqrt(2.0 * math.log(k * INV_SQRT_2PI))
    return root + 1.0 / root


def width_bound_polyhedral(alpha: float, k: int) -> float:
    """ Bound on the conic mean width of a k-polyhedral cone with circumangle alpha. """
    _check_angle(alpha)
    return math.tan(alpha) * polytope_width_bound(k) + INV_SQRT_2PI


def _check_sparsity(s_bar, d):
    if s_bar < 0 or s_bar > d - 3:
        raise DomainError("Evaluating bound failed! Expected 0 <= s_bar <= d - 3, got s_bar={}, d={}!".format(
            s_bar, d))


def width_bound_gauge(s_bar: int, d: int, alpha: float) -> float:
    """ Bound s_bar + (tan(alpha) (sqrt(2 log(2 (d - s_bar) / sqrt(2 pi))) + 1) + 1 / sqrt(2 pi))^2. """
    _check_sparsity(s_bar, d)
    _check_angle(alpha)
    root = math.sqrt(2.0 * math.log(2.0 * (d - s_bar) * INV_SQRT_2PI))
    return s_bar + (math.tan(alpha) * (root + 1.0) + INV_SQRT_2PI) ** 2


def sampling_rate_estimate(s_bar: int, d: int, alpha: float) -> float:
    """ The leading order s_bar + tan^2(alpha) log(2 (d - s_bar) / sqrt(2 pi)) of the gauge width bound. """
    _check_sparsity(s_bar, d)
    _check_angle(alpha)
    return s_bar + math.tan(alpha) ** 2 * math.log(2.0 * (d - s_bar) * INV_SQRT_2PI)


def sampling_bound_condition(kappa: float, width_sq: float) -> float:
    """ kappa^2 (width_sq + 1); an infinite condition number passes through. """
    if not kappa >= 1.0 or not width_sq >= 0.0:
        raise DomainError("Evaluating condition bound failed! Expected kappa >= 1 and width_sq >= 0, got {}, {}!".format(
            kappa, width_sq))
    if math.isinf(kappa):
        return math.inf
    return kappa ** 2 * (width_sq + 1.0)


def coherence_circumangle_bound(s: int, mu: float) -> float:
    """ Bound s (1 - s mu) / (1 - 2 s mu)^2 on tan^2 of the circumangle for s-sparse z and coherence mu. """
    if mu < 0 or mu > 1:
        raise DomainError("Evaluating coherence bound failed! Expected mu in [0, 1], got {}!".format(mu))
    if mu > 0 and not s < (1.0 + 1.0 / mu) / 2.0:
        raise DomainError("Evaluating coherence bound failed! Sparsity {} violates s < (1 + 1/mu) / 2 = {:.6g}!".format(
            s, (1.0 + 1.0 / mu) / 2.0))
    return s * (1.0 - s * mu) / (1.0 - 2.0 * s * mu) ** 2
