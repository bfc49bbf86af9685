"""
Convex subroutines: basis pursuit (equality and inequality constrained), nonnegative least squares, projections onto
finitely generated cones, circumcenters of pointed polyhedral cones and the representer uniqueness heuristic.
"""
import math

import numpy as np
import scipy.linalg
import scipy.optimize

from synthlab.errors import ConvergenceError, DomainError, InfeasibleError, NotPointedError
from synthlab.logger import Logger, log_method_call
from synthlab.models import BPSolution, CoefVector, Dictionary, PolyhedralCone, SolverSettings, as_coefficients
from synthlab.utils import STREAM_PERTURBATION, make_rng

__all__ = ["SolverSettings", "BPSolution", "soft_threshold", "solve_bp_eq", "solve_bp_ineq", "nnls", "project_cone",
           "circumcenter", "is_unique_representer", "perturbation_direction"]

# Iterations between two attempts to polish the ADMM iterate.
POLISH_INTERVAL = 50

# Relative thresholds (of ||z||_inf) used to extract candidate supports from an ADMM iterate.
SUPPORT_THRESHOLDS = (1e-3, 1e-6, 0.0)

# Singular values below RANK_TOLERANCE * sigma_max are treated as zero.
RANK_TOLERANCE = 1e-12

# Residual balancing of the ADMM penalty.
PENALTY_RATIO = 10.0
PENALTY_SCALE = 2.0

# Upper limit of ||p||_inf for the tie-breaking perturbations; the perturbed program stays bounded below.
PERTURBATION_LIMIT = 1e-2


def soft_threshold(v, threshold):
    """ The proximal map of threshold * ||.||_1. """
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def _as_problem(M, y):
    M = np.asarray(M, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if M.ndim != 2 or M.shape[0] != y.shape[0]:
        raise DomainError("Solving basis pursuit failed! Shapes {} and {} do not match!".format(M.shape, y.shape))
    return M, y


def _scaled(settings, value):
    return settings.feas_tol * max(1.0, value)


class _RowSpace:
    """ Thin SVD of M with the numerical rank cut off; provides least squares and the affine projection. """

    def __init__(self, M):
        U, singular_values, Vt = scipy.linalg.svd(M, full_matrices=False)
        largest = float(singular_values[0]) if singular_values.size else 0.0
        rank = int(np.sum(singular_values > RANK_TOLERANCE * largest)) if largest > 0 else 0
        self.U, self.singular_values, self.Vt = U[:, :rank], singular_values[:rank], Vt[:rank]

    def least_squares(self, y):
        """ The minimum norm minimizer of ||M z - y||. """
        return self.Vt.T @ ((self.U.T @ y) / self.singular_values)

    def dual_least_squares(self, g):
        """ The minimum norm minimizer of ||M^T w - g||. """
        return self.U @ ((self.Vt @ g) / self.singular_values)

    def project_nullspace(self, v):
        return v - self.Vt.T @ (self.Vt @ v)


def _candidate_supports(z):
    scale = np.max(np.abs(z), initial=0.0)
    seen = []
    for threshold in SUPPORT_THRESHOLDS:
        support = np.flatnonzero(np.abs(z) > threshold * scale)
        if not any(np.array_equal(support, other) for other in seen):
            seen.append(support)
            yield support


def _objective(z, linear):
    value = float(np.sum(np.abs(z)))
    return value if linear is None else value + float(linear @ z)


def _equality_certificate(M, z, linear, hint):
    """
    Violation of the optimality conditions M_S^T w = sign(z_S) + p_S and |M_j^T w - p_j| <= 1 off the support.

    The multiplier w is taken as the smallest correction of the hint (if any) and as the minimum norm solution; the
    smaller violation is reported.
    """
    linear = np.zeros(M.shape[1]) if linear is None else linear
    support = np.flatnonzero(z)
    off_support = np.setdiff1d(np.arange(M.shape[1]), support)
    target = np.sign(z[support]) + linear[support]
    M_S = M[:, support]
    candidates = [np.zeros(M.shape[0])] if support.size == 0 else []
    if support.size:
        if hint is not None:
            candidates.append(hint + scipy.linalg.lstsq(M_S.T, target - M_S.T @ hint)[0])
        candidates.append(scipy.linalg.lstsq(M_S.T, target)[0])
    violation = math.inf
    for w in candidates:
        equality = float(np.max(np.abs(M_S.T @ w - target), initial=0.0))
        bound = float(np.max(np.abs(M[:, off_support].T @ w - linear[off_support]), initial=0.0))
        violation = min(violation, max(equality, bound - 1.0, 0.0))
    return violation


def _better(best, candidate, violation, objective, settings):
    """ Certified candidates win; among uncertified ones (all feasible) the smaller objective wins. """
    if best is None:
        return candidate, violation, objective
    if violation <= settings.cert_tol < best[1]:
        return candidate, violation, objective
    if best[1] > settings.cert_tol and objective < best[2]:
        return candidate, violation, objective
    return best


def _polish_equality(M, y, z, linear, hint, settings):
    """
    Refits the ADMM iterate on its candidate supports so that M z = y holds exactly.

    Returns (z, violation) of the best feasible sign-consistent refit or None.
    """
    best = None
    for support in _candidate_supports(z):
        candidate = np.zeros_like(z)
        if support.size:
            M_S = M[:, support]
            candidate[support] = z[support] + scipy.linalg.lstsq(M_S, y - M_S @ z[support])[0]
        if np.linalg.norm(M @ candidate - y) > _scaled(settings, np.linalg.norm(y)):
            continue
        if np.any(candidate[support] * z[support] < 0):
            continue
        candidate[np.abs(candidate) <= 1e-15 * np.max(np.abs(candidate), initial=0.0)] = 0.0
        violation = _equality_certificate(M, candidate, linear, hint)
        best = _better(best, candidate, violation, _objective(candidate, linear), settings)
        if violation <= settings.cert_tol:
            break
    return None if best is None else best[:2]


def _admm_tolerances(settings, size, primal_scale, dual_scale):
    root = math.sqrt(size)
    return root * settings.abs_tol + settings.rel_tol * primal_scale, \
        root * settings.abs_tol + settings.rel_tol * dual_scale


def _balance_penalty(penalty, primal, dual):
    """ Residual balancing; returns the factor by which the penalty is multiplied. """
    if primal > PENALTY_RATIO * dual:
        return PENALTY_SCALE
    if dual > PENALTY_RATIO * primal:
        return 1.0 / PENALTY_SCALE
    return 1.0


@log_method_call()
def solve_bp_eq(M, y, settings: SolverSettings = None, linear=None) -> BPSolution:
    """
    Solves min ||z||_1 (+ <linear, z>) subject to M z = y.

    Over-relaxed ADMM on the splitting x = z where the x-step projects onto the affine set {M x = y} and the z-step
    soft-thresholds. The iterate is periodically refit on its support; a refit point with a valid dual certificate
    ends the iteration early.

    :raises InfeasibleError: if y is not in the range of M.
    """
    settings = settings or SolverSettings()
    logger = Logger.get_instance()
    M, y = _as_problem(M, y)
    d = M.shape[1]
    linear = None if linear is None else np.asarray(linear, dtype=float).reshape(-1)
    if linear is not None and linear.shape[0] != d:
        raise DomainError("Solving basis pursuit failed! Linear term has length {}, expected {}!".format(
            linear.shape[0], d))

    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0 and (linear is None or np.max(np.abs(linear)) <= 1.0):
        return BPSolution(CoefVector(np.zeros(d)), 0.0, 0.0, 0.0, True, 0, False)

    row_space = _RowSpace(M)
    if row_space.singular_values.size == 0:
        raise InfeasibleError("Solving basis pursuit failed! Measurement matrix is zero but y is not!")
    z_ls = row_space.least_squares(y)
    ls_residual = float(np.linalg.norm(M @ z_ls - y))
    if ls_residual > _scaled(settings, y_norm):
        raise InfeasibleError("Solving basis pursuit failed! y is not in the range of M (residual {:.3g})!".format(
            ls_residual))

    penalty, relaxation = settings.penalty, settings.over_relaxation
    z = np.zeros(d)
    u = np.zeros(d)
    last_support = None
    primal = dual = math.inf
    converged = False
    iteration = 0
    for iteration in range(1, settings.max_iters + 1):
        x = row_space.project_nullspace(z - u) + z_ls
        x_hat = relaxation * x + (1.0 - relaxation) * z
        z_old = z
        shifted = x_hat + u if linear is None else x_hat + u - linear / penalty
        z = soft_threshold(shifted, 1.0 / penalty)
        u = u + x_hat - z

        primal = float(np.linalg.norm(x - z))
        dual = penalty * float(np.linalg.norm(z - z_old))
        eps_primal, eps_dual = _admm_tolerances(
            settings, d, max(np.linalg.norm(x), np.linalg.norm(z)), penalty * np.linalg.norm(u))
        if primal <= eps_primal and dual <= eps_dual:
            converged = True
            break

        if iteration % POLISH_INTERVAL == 0:
            support = np.flatnonzero(z)
            if settings.polish and last_support is not None and np.array_equal(support, last_support):
                polished = _polish_equality(M, y, z, linear, row_space.dual_least_squares(penalty * u), settings)
                if polished is not None and polished[1] <= settings.cert_tol:
                    logger.debug("Basis pursuit polished after {} iterations.".format(iteration))
                    return _polished_solution(M, y, polished, iteration)
            last_support = support
            factor = _balance_penalty(penalty, primal, dual)
            if factor != 1.0:
                penalty *= factor
                u /= factor

    if settings.polish:
        polished = _polish_equality(M, y, z, linear, row_space.dual_least_squares(penalty * u), settings)
        if polished is not None:
            certified = polished[1] <= settings.cert_tol
            logger.debug("Basis pursuit polished after {} iterations (certified: {}).".format(iteration, certified))
            solution = _polished_solution(M, y, polished, iteration)
            return solution if certified else solution._replace(converged=converged)
    if not converged:
        logger.debug("Basis pursuit stopped after {} iterations (primal {:.3g}, dual {:.3g}).".format(
            iteration, primal, dual))
    return BPSolution(CoefVector(z), float(np.sum(np.abs(z))), primal, dual, converged, iteration, False)


def _polished_solution(M, y, polished, iteration, eta=0.0):
    """ Wraps a refit point; the primal residual is the constraint violation max(0, ||M z - y|| - eta). """
    z, violation = polished
    violated = max(0.0, float(np.linalg.norm(M @ z - y)) - eta)
    return BPSolution(CoefVector(z), float(np.sum(np.abs(z))), violated, violation, True, iteration, True)


def _project_ball(w, center, radius):
    offset = w - center
    norm = np.linalg.norm(offset)
    return w if norm <= radius else center + offset * (radius / norm)


class _GraphProjector:
    """ Euclidean projection onto the graph {(z, w) : w = M z}, factorized once. """

    def __init__(self, M):
        m, d = M.shape
        self.M = M
        self.wide = d > m
        gram = M @ M.T if self.wide else M.T @ M
        self.factor = scipy.linalg.cho_factor(np.eye(gram.shape[0]) + gram)

    def __call__(self, c, e):
        rhs = c + self.M.T @ e
        if self.wide:
            z = rhs - self.M.T @ scipy.linalg.cho_solve(self.factor, self.M @ rhs)
        else:
            z = scipy.linalg.cho_solve(self.factor, rhs)
        return z, self.M @ z


def _polish_inequality(M, y, eta, z, settings):
    """
    Closed-form refit on the support S with sign pattern s: z_S = z_ls - mu G^-1 s where G = M_S^T M_S and mu is
    chosen such that ||M z - y|| = eta. Returns (z, violation) or None.
    """
    best = None
    for support in _candidate_supports(z):
        if support.size == 0 or support.size > M.shape[0]:
            continue
        M_S = M[:, support]
        signs = np.sign(z[support])
        try:
            factor = scipy.linalg.cho_factor(M_S.T @ M_S)
        except scipy.linalg.LinAlgError:
            continue
        z_ls = scipy.linalg.cho_solve(factor, M_S.T @ y)
        direction = scipy.linalg.cho_solve(factor, signs)
        residual_ls = y - M_S @ z_ls
        slack = eta ** 2 - float(residual_ls @ residual_ls)
        spread = float(np.linalg.norm(M_S @ direction) ** 2)
        if slack <= 0 or spread == 0.0:
            continue
        multiplier = math.sqrt(slack / spread)
        candidate = np.zeros_like(z)
        candidate[support] = z_ls - multiplier * direction
        if np.any(np.sign(candidate[support]) != signs):
            continue
        correlations = np.abs(M.T @ (y - M @ candidate))
        violation = max(0.0, float(np.max(correlations)) / multiplier - 1.0)
        best = _better(best, candidate, violation, float(np.sum(np.abs(candidate))), settings)
        if violation <= settings.cert_tol:
            break
    return None if best is None else best[:2]


def _repair_feasibility(M, y, eta, z, z_ls):
    """ Moves z towards the least squares point until ||M z - y|| <= eta. """
    r1 = M @ z - y
    if np.linalg.norm(r1) <= eta:
        return z
    r0 = M @ z_ls - y
    delta = r1 - r0
    a = float(delta @ delta)
    if a == 0.0:
        return z_ls
    b = 2.0 * float(r0 @ delta)
    c = float(r0 @ r0) - eta ** 2
    t = (-b + math.sqrt(max(0.0, b * b - 4.0 * a * c))) / (2.0 * a)
    t = min(1.0, max(0.0, t))
    return z_ls + t * (z - z_ls)


@log_method_call()
def solve_bp_ineq(M, y, eta: float, settings: SolverSettings = None) -> BPSolution:
    """
    Solves min ||z||_1 subject to ||M z - y||_2 <= eta.

    eta = 0 is delegated to solve_bp_eq. Otherwise over-relaxed ADMM with graph projection splitting on (z, w = M z):
    the prox step soft-thresholds z and projects w onto the ball of radius eta around y.

    :raises DomainError: if eta < 0.
    :raises InfeasibleError: if the distance of y to the range of M exceeds eta.
    """
    if eta < 0:
        raise DomainError("Solving basis pursuit failed! Expected eta >= 0, got {}!".format(eta))
    settings = settings or SolverSettings()
    if eta == 0:
        return solve_bp_eq(M, y, settings)
    logger = Logger.get_instance()
    M, y = _as_problem(M, y)
    m, d = M.shape
    y_norm = float(np.linalg.norm(y))
    if eta >= y_norm:
        return BPSolution(CoefVector(np.zeros(d)), 0.0, 0.0, 0.0, True, 0, False)

    row_space = _RowSpace(M)
    z_ls = row_space.least_squares(y) if row_space.singular_values.size else np.zeros(d)
    distance = float(np.linalg.norm(M @ z_ls - y))
    if distance > eta + _scaled(settings, y_norm):
        raise InfeasibleError("Solving basis pursuit failed! Distance {:.3g} of y to the range of M exceeds "
                              "eta = {:.3g}!".format(distance, eta))

    project_graph = _GraphProjector(M)
    penalty, relaxation = settings.penalty, settings.over_relaxation
    z_graph, w_graph = np.zeros(d), np.zeros(m)
    u_z, u_w = np.zeros(d), np.zeros(m)
    z_half = np.zeros(d)
    primal = dual = math.inf
    converged = False
    iteration = 0
    for iteration in range(1, settings.max_iters + 1):
        z_half = soft_threshold(z_graph - u_z, 1.0 / penalty)
        w_half = _project_ball(w_graph - u_w, y, eta)
        z_relaxed = relaxation * z_half + (1.0 - relaxation) * z_graph
        w_relaxed = relaxation * w_half + (1.0 - relaxation) * w_graph
        z_old, w_old = z_graph, w_graph
        z_graph, w_graph = project_graph(z_relaxed + u_z, w_relaxed + u_w)
        u_z = u_z + z_relaxed - z_graph
        u_w = u_w + w_relaxed - w_graph

        primal = math.hypot(np.linalg.norm(z_half - z_graph), np.linalg.norm(w_half - w_graph))
        dual = penalty * math.hypot(np.linalg.norm(z_graph - z_old), np.linalg.norm(w_graph - w_old))
        eps_primal, eps_dual = _admm_tolerances(
            settings, d + m,
            max(math.hypot(np.linalg.norm(z_half), np.linalg.norm(w_half)),
                math.hypot(np.linalg.norm(z_graph), np.linalg.norm(w_graph))),
            penalty * math.hypot(np.linalg.norm(u_z), np.linalg.norm(u_w)))
        if primal <= eps_primal and dual <= eps_dual:
            converged = True
            break

        if iteration % POLISH_INTERVAL == 0:
            if settings.polish:
                polished = _polish_inequality(M, y, eta, z_half, settings)
                if polished is not None and polished[1] <= settings.cert_tol:
                    logger.debug("Basis pursuit (eta={:.3g}) polished after {} iterations.".format(eta, iteration))
                    return _polished_solution(M, y, polished, iteration, eta)
            factor = _balance_penalty(penalty, primal, dual)
            if factor != 1.0:
                penalty *= factor
                u_z /= factor
                u_w /= factor

    z = _repair_feasibility(M, y, eta, z_half, z_ls)
    if settings.polish:
        polished = _polish_inequality(M, y, eta, z_half, settings)
        if polished is not None:
            certified = polished[1] <= settings.cert_tol
            if certified or np.sum(np.abs(polished[0])) <= np.sum(np.abs(z)):
                solution = _polished_solution(M, y, polished, iteration, eta)
                return solution if certified else solution._replace(converged=converged)
    if not converged:
        logger.debug("Basis pursuit (eta={:.3g}) stopped after {} iterations (primal {:.3g}, dual {:.3g}).".format(
            eta, iteration, primal, dual))
    return BPSolution(CoefVector(z), float(np.sum(np.abs(z))), primal, dual, converged, iteration, False)


def _kkt_violation(R, g, c):
    gradient = R.T @ (R @ c - g)
    return max(0.0, float(-np.min(gradient)), float(np.max(np.abs(c * gradient))), float(-np.min(c)))


def _passive_solve(R, g, c, passive):
    """ Moves the feasible point c to the least squares solution on the passive set, dropping blocking indices. """
    k = R.shape[1]
    for _ in range(k + 1):
        if not np.any(passive):
            return np.zeros(k), passive
        trial = np.zeros(k)
        trial[passive] = scipy.linalg.lstsq(R[:, passive], g)[0]
        if np.all(trial[passive] > 0):
            return trial, passive
        blocking = np.flatnonzero(passive & (trial <= 0))
        ratios = c[blocking] / np.maximum(c[blocking] - trial[blocking], np.finfo(float).tiny)
        step = float(np.min(ratios))
        c = c + step * (trial - c)
        c[blocking[ratios <= step]] = 0.0
        passive = passive & (c > 0)
        c[~passive] = 0.0
    return c, passive


def _lawson_hanson(R, g, c, tolerance, max_iters):
    """ Active set iterations of Lawson and Hanson, warm-started at the nonnegative point c. """
    c = np.where(c > 0, c, 0.0)
    c, passive = _passive_solve(R, g, c, c > 0)
    for _ in range(max_iters):
        gradient = R.T @ (g - R @ c)
        candidates = ~passive & (gradient > tolerance)
        if not np.any(candidates):
            break
        passive = passive.copy()
        passive[int(np.argmax(np.where(candidates, gradient, -np.inf)))] = True
        c, passive = _passive_solve(R, g, c, passive)
    return c


@log_method_call()
def nnls(R, g, settings: SolverSettings = None):
    """
    Solves min_{c >= 0} ||g - R c||_2.

    The result is certified by the KKT conditions c >= 0, R^T (R c - g) >= -tol and |c_i [R^T (R c - g)]_i| <= tol.

    :return: a tuple (c, residual) with residual = g - R c.
    :raises ConvergenceError: if the KKT conditions can not be established; carries the best iterate.
    """
    settings = settings or SolverSettings()
    R = np.asarray(R, dtype=float)
    g = np.asarray(g, dtype=float).reshape(-1)
    if R.ndim != 2 or R.shape[1] < 1 or R.shape[0] != g.shape[0]:
        raise DomainError("Solving NNLS failed! Shapes {} and {} do not match!".format(R.shape, g.shape))
    tolerance = settings.kkt_tol * max(1.0, float(np.linalg.norm(R) * np.linalg.norm(g)))
    try:
        c = scipy.optimize.nnls(R, g)[0]
    except RuntimeError:
        c = np.zeros(R.shape[1])
    violation = _kkt_violation(R, g, c)
    if violation > tolerance:
        Logger.get_instance().debug("NNLS refining (KKT violation {:.3g}).".format(violation))
        c = _lawson_hanson(R, g, c, tolerance, max(100, 3 * R.shape[1]))
        violation = _kkt_violation(R, g, c)
    if violation > tolerance:
        Logger.get_instance().debug("NNLS restarting cold (KKT violation {:.3g}).".format(violation))
        cold = _lawson_hanson(R, g, np.zeros(R.shape[1]), tolerance, max(100, 3 * R.shape[1]))
        if _kkt_violation(R, g, cold) < violation:
            c, violation = cold, _kkt_violation(R, g, cold)
    if violation > tolerance:
        raise ConvergenceError("Solving NNLS failed! KKT violation {:.3g} exceeds {:.3g}!".format(
            violation, tolerance), best=c, report={"kkt_violation": violation, "tolerance": tolerance})
    return c, g - R @ c


def _generators(cone):
    return cone.generators if isinstance(cone, PolyhedralCone) else np.asarray(cone, dtype=float)


def project_cone(cone, g, settings: SolverSettings = None):
    """ The Euclidean projection of g onto the cone generated by the columns of the generator matrix. """
    R = _generators(cone)
    c, _ = nnls(R, g, settings)
    return R @ c


def _least_distance(X, settings):
    """
    Solves min ||v|| subject to X^T v >= 1 through the NNLS dual: min ||E u - f|| with E = [X; 1^T], f = e_{n+1}.

    Returns None if the constraints are incompatible.
    """
    n = X.shape[0]
    E = np.vstack([X, np.ones((1, X.shape[1]))])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u, _ = nnls(E, f, settings)
    residual = E @ u - f
    if np.linalg.norm(residual) <= 1e-12 or residual[n] >= -1e-12:
        return None
    return -residual[:n] / residual[n]


def _subgradient_search(X, starts, iterations):
    """ Projected supergradient ascent of min_i <theta, x_i> over the unit ball with a Polyak-type step. """
    best_theta, best_value = None, -math.inf
    for theta in starts:
        theta = theta / max(1.0, np.linalg.norm(theta))
        run_best = -math.inf
        for t in range(1, iterations + 1):
            values = X.T @ theta
            index = int(np.argmin(values))
            value = float(values[index])
            if value > run_best:
                run_best = value
            if value > best_value:
                best_theta, best_value = theta, value
            target = run_best + 1.0 / t
            theta = theta + (target - value) * X[:, index]
            theta = theta / max(1.0, np.linalg.norm(theta))
    return best_theta, best_value


def circumcenter_certificate(X, theta, cos_alpha, settings):
    """ Distance of cos(alpha) theta to the convex hull of the active generators. """
    active = np.flatnonzero(X.T @ theta <= cos_alpha + settings.act_tol)
    E = np.vstack([X[:, active], np.ones((1, active.size))])
    f = np.append(cos_alpha * theta, 1.0)
    _, residual = nnls(E, f, settings)
    return float(np.linalg.norm(residual)), active


@log_method_call()
def circumcenter(cone, settings: SolverSettings = None):
    """
    The circumcenter theta and circumangle alpha of a pointed polyhedral cone.

    cos(alpha) = max_{||theta|| <= 1} min_i <theta, x_i> over the normalized generators x_i. A projected supergradient
    search with random restarts identifies the active generators; the optimum is then computed exactly from the least
    distance problem min ||v|| s.t. <v, x_i> >= 1 (theta = v / ||v||, cos(alpha) = 1 / ||v||) and certified by
    cos(alpha) theta lying in the convex hull of the active generators.

    :raises NotPointedError: if the cone is not strictly pointed within tolerance.
    :raises ConvergenceError: if the optimality certificate fails.
    """
    settings = settings or SolverSettings()
    logger = Logger.get_instance()
    if not isinstance(cone, PolyhedralCone):
        cone = PolyhedralCone(cone)
    X = cone.normalize().generators
    n, k = X.shape
    if k == 1:
        return X[:, 0].copy(), 0.0

    rng = make_rng(settings.seed, STREAM_PERTURBATION)
    starts = [rng.standard_normal(n) for _ in range(settings.restarts)]
    mean = X.mean(axis=1)
    if np.linalg.norm(mean) > 0:
        starts.insert(0, mean / np.linalg.norm(mean))
    if not starts:
        starts.append(X[:, 0])
    theta, value = _subgradient_search(X, starts, settings.subgradient_iters)
    logger.debug("Circumcenter search over {} starts reached cos(alpha) = {:.6g}.".format(len(starts), value))

    active = np.flatnonzero(X.T @ theta <= value + max(settings.act_tol, 1e-3))
    if active.size == 0:
        active = np.array([int(np.argmin(X.T @ theta))])
    v = None
    for _ in range(k):
        v = _least_distance(X[:, active], settings)
        if v is None:
            raise NotPointedError("Computing circumcenter failed! Cone not strictly pointed within tolerance!",
                                  best=theta, report={"cos_alpha": value, "active": active.size})
        violated = np.flatnonzero(X.T @ v < 1.0 - 1e-12)
        violated = np.setdiff1d(violated, active)
        if violated.size == 0:
            break
        active = np.union1d(active, violated)
    theta = v / np.linalg.norm(v)
    cos_alpha = float(np.min(X.T @ theta))
    if cos_alpha <= 0:
        raise NotPointedError("Computing circumcenter failed! Cone not strictly pointed within tolerance!",
                              best=theta, report={"cos_alpha": cos_alpha})

    gap, certified = circumcenter_certificate(X, theta, cos_alpha, settings)
    if gap > settings.cert_tol:
        raise ConvergenceError("Computing circumcenter failed! Certificate gap {:.3g} exceeds {:.3g}!".format(
            gap, settings.cert_tol), best=(theta, cos_alpha), report={"gap": gap, "active": certified.size})
    logger.debug("Circumcenter certified with {} active generators (gap {:.3g}).".format(certified.size, gap))
    return theta, math.acos(min(1.0, cos_alpha))


def perturbation_direction(d, settings, key=0, scale=1.0):
    """ A seeded random objective perturbation p with ||p||_inf = settings.perturbation * max(1, scale). """
    xi = make_rng(settings.seed, STREAM_PERTURBATION, key).standard_normal(d)
    magnitude = min(settings.perturbation * max(1.0, float(scale)), PERTURBATION_LIMIT)
    return magnitude * xi / np.max(np.abs(xi))


@log_method_call()
def is_unique_representer(dictionary: Dictionary, z, settings: SolverSettings = None) -> bool:
    """
    Heuristic test whether z is the unique minimal l1-representer of D z.

    Linearly dependent supported atoms rule uniqueness out. Otherwise min ||w||_1 (+ <p, w>) s.t. D w = D z is solved
    for two antithetic perturbations p and -p; both solutions must match z and the unperturbed optimum must equal
    ||z||_1.
    """
    settings = settings or SolverSettings()
    logger = Logger.get_instance()
    z = as_coefficients(z)
    entries = np.asarray(z)
    x = dictionary.synthesize(entries)
    if np.linalg.norm(x) == 0.0:
        raise DomainError("Checking uniqueness failed! D z must be nonzero!")
    support = z.significant_support()
    if np.linalg.matrix_rank(dictionary.matrix[:, support]) < support.size:
        logger.debug("Supported atoms are linearly dependent.")
        return False

    tolerance = 10.0 * settings.feas_tol * max(1.0, float(np.linalg.norm(entries)))
    perturbation = perturbation_direction(dictionary.d, settings, scale=z.l1_norm())
    for linear in (perturbation, -perturbation):
        solution = solve_bp_eq(dictionary.matrix, x, settings, linear=linear)
        distance = float(np.linalg.norm(np.asarray(solution.z) - entries))
        if distance > tolerance:
            logger.debug("Perturbed representer deviates by {:.3g}.".format(distance))
            return False
    solution = solve_bp_eq(dictionary.matrix, x, settings)
    return abs(solution.objective - z.l1_norm()) <= settings.opt_tol * max(1.0, z.l1_norm())
