import math
from collections import namedtuple
from dataclasses import dataclass, fields

import numpy as np

from synthlab.errors import ConstructionError, DomainError

# Labels of dictionaries whose atoms are unit-norm by construction.
UNIT_NORM_LABELS = frozenset(["identity", "haar", "duplicated-identity"])

# Suffix appended to the label of explicitly normalized dictionaries.
UNIT_SUFFIX = "/unit"

UNIT_NORM_TOLERANCE = 1e-12


def _frozen(array):
    array.setflags(write=False)
    return array


class Dictionary:
    """
    An n x d synthesis matrix D = [d_1, ..., d_d] together with the name of its construction recipe.

    matrix:     dense real matrix with n rows (signal dimension) and d columns (atoms).
    label:      construction name (e.g. "haar", "conv-pair", "gaussian/unit").
    atom_norms: Euclidean norms of the columns.
    params:     the construction parameters (informational, not part of equality).
    """

    def __init__(self, matrix, label: str, params=None):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise ConstructionError("Creating dictionary '{}' failed! Expected a non-empty matrix, got shape {}!".format(
                label, matrix.shape))
        if not np.all(np.isfinite(matrix)):
            raise ConstructionError("Creating dictionary '{}' failed! Matrix has non-finite entries!".format(label))
        if "," in label or "\n" in label:
            raise ConstructionError("Creating dictionary failed! Label '{}' contains a separator!".format(label))
        self.matrix = _frozen(matrix)
        self.label = label
        self.params = dict(params or {})
        self.atom_norms = _frozen(np.linalg.norm(matrix, axis=0))
        if self.declares_unit_norm and np.any(np.abs(self.atom_norms - 1.0) > UNIT_NORM_TOLERANCE):
            raise ConstructionError(
                "Creating dictionary '{}' failed! Label declares unit-norm atoms but norms deviate by {:.3g}!".format(
                    label, float(np.max(np.abs(self.atom_norms - 1.0)))))

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def d(self):
        return self.matrix.shape[1]

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def declares_unit_norm(self):
        return self.label in UNIT_NORM_LABELS or self.label.endswith(UNIT_SUFFIX)

    @property
    def spectral_norm(self):
        """ The operator norm ||D||_2 (largest singular value). """
        return float(np.linalg.norm(self.matrix, 2))

    def synthesize(self, z):
        """ Returns the signal D z. """
        return self.matrix @ np.asarray(z, dtype=float)

    def __eq__(self, other):
        if not isinstance(other, Dictionary):
            return NotImplemented
        return self.label == other.label and self.shape == other.shape and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.label, self.shape))

    def __repr__(self):
        return "Dictionary(label={!r}, n={}, d={})".format(self.label, self.n, self.d)


class CoefVector:
    """ A coefficient vector z in R^d; its support is the set of nonzero entries. """

    def __init__(self, entries):
        entries = np.array(entries, dtype=float).reshape(-1)
        if not np.all(np.isfinite(entries)):
            raise DomainError("Creating coefficient vector failed! Entries must be finite!")
        self.entries = _frozen(entries)

    @property
    def support(self):
        return np.flatnonzero(self.entries)

    @property
    def sparsity(self):
        return int(np.count_nonzero(self.entries))

    @property
    def shape(self):
        return self.entries.shape

    def significant_support(self, rel_tol=1e-12):
        """ Indices of entries above rel_tol * ||z||_inf; smaller entries count as zero. """
        scale = np.max(np.abs(self.entries), initial=0.0)
        if scale == 0.0:
            return np.zeros(0, dtype=int)
        return np.flatnonzero(np.abs(self.entries) > rel_tol * scale)

    def signs(self, rel_tol=1e-12):
        """ sign(z) where entries below rel_tol * ||z||_inf are treated as zero. """
        signs = np.zeros_like(self.entries)
        support = self.significant_support(rel_tol)
        signs[support] = np.sign(self.entries[support])
        return signs

    def l1_norm(self):
        return float(np.sum(np.abs(self.entries)))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __len__(self):
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, CoefVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return "CoefVector(d={}, support={})".format(len(self), self.support.tolist())


class SignalVector:
    """ A signal x in R^n. """

    def __init__(self, entries):
        entries = np.array(entries, dtype=float).reshape(-1)
        if not np.all(np.isfinite(entries)):
            raise DomainError("Creating signal vector failed! Entries must be finite!")
        self.entries = _frozen(entries)

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __len__(self):
        return self.entries.shape[0]

    def __repr__(self):
        return "SignalVector(n={})".format(len(self))


def as_coefficients(z) -> CoefVector:
    return z if isinstance(z, CoefVector) else CoefVector(z)


def as_signal(x) -> SignalVector:
    return x if isinstance(x, SignalVector) else SignalVector(x)


@dataclass(frozen=True)
class SolverSettings:
    """ Parameters shared by all convex subroutines. """

    max_iters: int = 50000
    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    penalty: float = 1.0
    over_relaxation: float = 1.5
    feas_tol: float = 1e-8
    opt_tol: float = 1e-6
    kkt_tol: float = 1e-10
    cert_tol: float = 1e-8
    act_tol: float = 1e-6
    restarts: int = 20
    subgradient_iters: int = 400
    perturbation: float = 1e-7
    polish: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.max_iters < 1 or self.subgradient_iters < 1:
            raise DomainError("Creating solver settings failed! Iteration limits must be at least 1!")
        for name in ("abs_tol", "rel_tol", "feas_tol", "opt_tol", "kkt_tol", "cert_tol", "act_tol", "perturbation"):
            if not getattr(self, name) > 0:
                raise DomainError("Creating solver settings failed! '{}' must be positive!".format(name))
        if not self.penalty > 0:
            raise DomainError("Creating solver settings failed! 'penalty' must be positive!")
        if not 1.0 <= self.over_relaxation <= 1.9:
            raise DomainError("Creating solver settings failed! 'over_relaxation' must lie in [1, 1.9]!")
        if self.restarts < 0:
            raise DomainError("Creating solver settings failed! 'restarts' must be non-negative!")

    @classmethod
    def field_names(cls):
        return [field.name for field in fields(cls)]


BPSolution = namedtuple("BPSolution", [
    "z",                # CoefVector
    "objective",        # ||z||_1
    "primal_residual",  # ADMM primal residual (constraint violation for polished points)
    "dual_residual",
    "converged",
    "iterations",
    "polished",         # True if the reported z stems from the support polish
])


class PolyhedralCone:
    """ A finitely generated cone cone(x_1, ..., x_k) stored as an n x k generator matrix. """

    def __init__(self, generators, normalized=False, label=""):
        generators = np.array(generators, dtype=float)
        if generators.ndim == 1:
            generators = generators.reshape(-1, 1)
        if generators.ndim != 2 or generators.shape[1] < 1 or generators.shape[0] < 1:
            raise DomainError("Creating cone failed! Expected at least one generator, got shape {}!".format(
                generators.shape))
        norms = np.linalg.norm(generators, axis=0)
        if np.any(norms == 0.0):
            raise DomainError("Creating cone failed! Generators must be nonzero!")
        if normalized and np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
            raise DomainError("Creating cone failed! Generators flagged as normalized do not have unit norm!")
        self.generators = _frozen(generators)
        self.normalized = normalized
        self.label = label

    @property
    def n(self):
        return self.generators.shape[0]

    @property
    def k(self):
        return self.generators.shape[1]

    def normalize(self):
        """ The same cone with unit-norm generators. """
        if self.normalized:
            return self
        generators = self.generators / np.linalg.norm(self.generators, axis=0)
        return PolyhedralCone(generators, normalized=True, label=self.label)

    def __repr__(self):
        return "PolyhedralCone(n={}, k={}, label={!r})".format(self.n, self.k, self.label)


class ConeDecomposition:
    """
    Orthogonal decomposition C = C_L (+) C_R of a convex cone into its lineality space and its range.

    lineality_basis: n x l matrix with orthonormal columns spanning C_L.
    range_cone:      PolyhedralCone generating C_R inside the orthogonal complement of C_L, or None if C_R = {0}.
    circum_theta:    circumcenter of C_R (unit vector) or None.
    circum_alpha:    circumangle of C_R in [0, pi/2) or None.
    """

    def __init__(self, lineality_basis, range_cone=None, circum_theta=None, circum_alpha=None, n=None):
        lineality_basis = np.array(lineality_basis, dtype=float)
        if lineality_basis.ndim == 1:
            lineality_basis = lineality_basis.reshape(-1, 1 if lineality_basis.size else 0)
        if lineality_basis.shape[1] == 0 and n is not None:
            lineality_basis = np.zeros((n, 0))
        gram = lineality_basis.T @ lineality_basis
        if np.any(np.abs(gram - np.eye(gram.shape[0])) > 1e-10):
            raise DomainError("Creating cone decomposition failed! Lineality basis is not orthonormal!")
        if range_cone is not None and lineality_basis.shape[1] > 0:
            overlap = np.max(np.abs(lineality_basis.T @ range_cone.generators))
            if overlap > 1e-8 * max(1.0, float(np.max(np.abs(range_cone.generators)))):
                raise DomainError("Creating cone decomposition failed! Range generators are not orthogonal to C_L!")
        if circum_alpha is not None and not 0.0 <= circum_alpha < math.pi / 2:
            raise DomainError("Creating cone decomposition failed! Circumangle must lie in [0, pi/2)!")
        self.lineality_basis = _frozen(lineality_basis)
        self.range_cone = range_cone
        self.circum_theta = None if circum_theta is None else _frozen(np.array(circum_theta, dtype=float))
        self.circum_alpha = circum_alpha

    @property
    def n(self):
        return self.lineality_basis.shape[0]

    @property
    def lineality_dim(self):
        return self.lineality_basis.shape[1]

    @property
    def range_generator_count(self):
        return 0 if self.range_cone is None else self.range_cone.k

    @property
    def tan2_alpha(self):
        return None if self.circum_alpha is None else math.tan(self.circum_alpha) ** 2

    def project_complement(self, vectors):
        """ Orthogonal projection onto the complement of C_L (works for vectors and column matrices). """
        vectors = np.asarray(vectors, dtype=float)
        if self.lineality_dim == 0:
            return vectors.copy()
        basis = self.lineality_basis
        return vectors - basis @ (basis.T @ vectors)

    def with_circumcenter(self, theta, alpha):
        return ConeDecomposition(self.lineality_basis, self.range_cone, theta, alpha)

    def __repr__(self):
        return "ConeDecomposition(n={}, lineality_dim={}, range_generators={}, alpha={})".format(
            self.n, self.lineality_dim, self.range_generator_count, self.circum_alpha)


WidthEstimate = namedtuple("WidthEstimate", ["statdim", "stderr", "samples", "seed"])

SamplingPrediction = namedtuple("SamplingPrediction", ["m0", "width_sq", "u", "c_const", "gamma"])

MeasurementEnsemble = namedtuple("MeasurementEnsemble", ["kind", "m", "n", "seed"])

TrialResult = namedtuple("TrialResult", [
    "m", "eta", "seed",
    "coef_err", "sig_err",
    "coef_success", "sig_success",
    "solver_converged",
])


class PhaseGrid:
    """
    Success counts of a phase transition experiment.

    The count matrices have one row per sparsity value and one column per number of measurements.
    """

    def __init__(self, m_values, s_values, trials_per_cell, overlay=None, overlay_stderr=None):
        self.m_values = [int(m) for m in m_values]
        self.s_values = [int(s) for s in s_values]
        self.trials_per_cell = int(trials_per_cell)
        shape = (len(self.s_values), len(self.m_values))
        self.success_counts_coef = np.zeros(shape, dtype=int)
        self.success_counts_sig = np.zeros(shape, dtype=int)
        self.solver_failures = np.zeros(shape, dtype=int)
        self.overlay = None if overlay is None else [float(value) for value in overlay]
        self.overlay_stderr = None if overlay_stderr is None else [float(value) for value in overlay_stderr]

    def record(self, row, column, result: TrialResult):
        """ Counts a trial. Trials whose solver did not converge only count as solver failures. """
        if not result.solver_converged:
            self.solver_failures[row, column] += 1
            return
        self.success_counts_coef[row, column] += int(result.coef_success)
        self.success_counts_sig[row, column] += int(result.sig_success)

    def fractions(self, criterion="sig"):
        counts = self.success_counts_sig if criterion == "sig" else self.success_counts_coef
        return counts / float(self.trials_per_cell)

    @property
    def total_trials(self):
        return self.trials_per_cell * len(self.s_values) * len(self.m_values)

    @property
    def failure_rate(self):
        return float(np.sum(self.solver_failures)) / max(1, self.total_trials)


class NoiseSweep:
    """ Mean recovery errors over a range of noise levels together with the signal error bound. """

    def __init__(self, eta_values, mean_coef_err, mean_sig_err, bound_sig, m, m0, trials, violations, failures):
        if not len(eta_values) == len(mean_coef_err) == len(mean_sig_err) == len(bound_sig):
            raise DomainError("Creating noise sweep failed! Lists must share their length!")
        self.eta_values = [float(eta) for eta in eta_values]
        self.mean_coef_err = [float(err) for err in mean_coef_err]
        self.mean_sig_err = [float(err) for err in mean_sig_err]
        self.bound_sig = [None if bound is None else float(bound) for bound in bound_sig]
        self.m = m
        self.m0 = m0
        self.trials = int(trials)
        self.violations = [int(count) for count in violations]
        self.failures = [int(count) for count in failures]

    @property
    def failure_rate(self):
        return float(sum(self.failures)) / max(1, self.trials * len(self.eta_values))
