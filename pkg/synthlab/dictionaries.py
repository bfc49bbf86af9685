"""
Constructions of synthesis dictionaries D in R^{n x d}.

Every constructor is deterministic given its arguments (and seed), so re-running it yields a bit-identical matrix.
"""
import math

import numpy as np
import scipy.linalg

from synthlab.errors import ConstructionError, DomainError, NumericalError
from synthlab.logger import Logger, log_method_call
from synthlab.models import Dictionary, CoefVector, UNIT_SUFFIX, as_signal
from synthlab.utils import make_rng

# Standard deviation (in samples) of the super-resolution kernel.
SUPERRES_SIGMA = 10.0

# Tolerance of the Moore-Penrose identities checked by make_tv_pinv.
PINV_TOLERANCE = 1e-8


@log_method_call()
def make_identity(n: int) -> Dictionary:
    if n < 1:
        raise ConstructionError("Creating identity failed! Expected n >= 1, got {}!".format(n))
    return Dictionary(np.eye(n), "identity", {"n": n})


@log_method_call()
def make_duplicated_identity(n: int) -> Dictionary:
    """ The concatenation [Id | Id]; every atom has an exact twin. """
    if n < 1:
        raise ConstructionError("Creating duplicated identity failed! Expected n >= 1, got {}!".format(n))
    return Dictionary(np.hstack([np.eye(n), np.eye(n)]), "duplicated-identity", {"n": n})


@log_method_call()
def make_gaussian(n: int, d: int, seed: int) -> Dictionary:
    """ A matrix with i.i.d. standard normal entries. Columns are not normalized. """
    if n < 1 or d < 1:
        raise ConstructionError("Creating gaussian dictionary failed! Expected n, d >= 1, got {}x{}!".format(n, d))
    return Dictionary(make_rng(seed).standard_normal((n, d)), "gaussian", {"n": n, "d": d, "seed": seed})


def _haar_filters(n: int, levels: int):
    """ Yields the unit-norm undecimated Haar detail filters (fine to coarse) followed by the scaling filter. """
    for scale in range(1, levels + 1):
        width = 2 ** scale
        kernel = np.zeros(n)
        kernel[:width // 2] = 1.0
        kernel[width // 2:width] = -1.0
        yield kernel / math.sqrt(width)
    width = 2 ** levels
    kernel = np.zeros(n)
    kernel[:width] = 1.0
    yield kernel / math.sqrt(width)


@log_method_call()
def make_haar_redundant(n: int, levels: int) -> Dictionary:
    """
    The undecimated periodic Haar frame with unit-norm atoms.

    Columns are all circular shifts of the detail atoms at scales 1..levels (fine to coarse) followed by all circular
    shifts of the scaling atom at the coarsest scale, which gives d = n * (levels + 1).
    """
    if n < 2 or n & (n - 1):
        raise ConstructionError("Creating haar frame failed! Expected n to be a power of two, got {}!".format(n))
    max_levels = int(math.log2(n))
    if not 1 <= levels <= max_levels:
        raise ConstructionError("Creating haar frame failed! Expected 1 <= levels <= {}, got {}!".format(
            max_levels, levels))
    blocks = [scipy.linalg.circulant(kernel) for kernel in _haar_filters(n, levels)]
    return Dictionary(np.hstack(blocks), "haar", {"n": n, "levels": levels})


@log_method_call()
def make_conv_pair(n: int) -> Dictionary:
    """
    Concatenation [H_1 | H_2] of the circular convolutions with the kernels [1, 1] and [1, -1].

    Column j of H_1 is e_j + e_{j-1}, column j of H_2 is e_j - e_{j-1} (indices modulo n).
    """
    if n < 3:
        raise ConstructionError("Creating convolution pair failed! Expected n >= 3, got {}!".format(n))
    smooth = np.zeros(n)
    smooth[0], smooth[-1] = 1.0, 1.0
    detail = np.zeros(n)
    detail[0], detail[-1] = 1.0, -1.0
    matrix = np.hstack([scipy.linalg.circulant(smooth), scipy.linalg.circulant(detail)])
    return Dictionary(matrix, "conv-pair", {"n": n})


@log_method_call()
def make_superres(n: int, sigma: float = SUPERRES_SIGMA, normalize: bool = False) -> Dictionary:
    """ Circular convolution with a periodized sampled Gaussian exp(-j^2 / (2 sigma^2)). """
    if n < 4:
        raise ConstructionError("Creating super-resolution dictionary failed! Expected n >= 4, got {}!".format(n))
    if not sigma > 0:
        raise ConstructionError("Creating super-resolution dictionary failed! Expected sigma > 0, got {}!".format(
            sigma))
    offsets = np.arange(n, dtype=float)
    images = int(math.ceil(8.0 * sigma / n)) + 1
    kernel = np.zeros(n)
    for image in range(-images, images + 1):
        kernel += np.exp(-(offsets - image * n) ** 2 / (2.0 * sigma ** 2))
    dictionary = Dictionary(scipy.linalg.circulant(kernel), "superres", {"n": n, "sigma": sigma})
    return normalize_atoms(dictionary) if normalize else dictionary


def forward_differences(n: int) -> np.ndarray:
    """ The discrete gradient with rows e_{i+1} - e_i (Neumann boundary), shape (n - 1) x n. """
    return np.diff(np.eye(n), axis=0)


@log_method_call()
def make_tv_pinv(n: int) -> Dictionary:
    """ The Moore-Penrose inverse of the forward-difference gradient; atoms span the zero-mean signals. """
    if n < 3:
        raise ConstructionError("Creating TV dictionary failed! Expected n >= 3, got {}!".format(n))
    gradient = forward_differences(n)
    inverse = scipy.linalg.pinv(gradient)
    residual = max(
        float(np.max(np.abs(gradient @ inverse @ gradient - gradient))),
        float(np.max(np.abs(inverse @ gradient @ inverse - inverse))))
    if residual > PINV_TOLERANCE:
        raise NumericalError("Creating TV dictionary failed! Pseudoinverse residual {:.3g} exceeds {}!".format(
            residual, PINV_TOLERANCE))
    Logger.get_instance().debug("Pseudoinverse residual of the {}-point gradient is {:.3g}.".format(n, residual))
    return Dictionary(inverse, "tv-pinv", {"n": n})


def normalize_atoms(dictionary: Dictionary) -> Dictionary:
    """ Rescales every atom to unit norm. The label gets the suffix '/unit'. """
    if dictionary.declares_unit_norm:
        return dictionary
    if np.any(dictionary.atom_norms == 0.0):
        raise ConstructionError("Normalizing '{}' failed! Dictionary has a zero atom!".format(dictionary.label))
    params = dict(dictionary.params, normalize=True)
    return Dictionary(dictionary.matrix / dictionary.atom_norms, dictionary.label + UNIT_SUFFIX, params)


def coherence(dictionary) -> float:
    """ The mutual coherence max_{i != j} |<d_i, d_j>| / (||d_i|| ||d_j||). """
    matrix = dictionary.matrix if isinstance(dictionary, Dictionary) else np.asarray(dictionary, dtype=float)
    if matrix.shape[1] < 2:
        raise DomainError("Computing coherence failed! Expected at least two atoms!")
    norms = np.linalg.norm(matrix, axis=0)
    if np.any(norms == 0.0):
        raise DomainError("Computing coherence failed! Dictionary has a zero atom!")
    normalized = matrix / norms
    gram = np.abs(normalized.T @ normalized)
    np.fill_diagonal(gram, 0.0)
    return float(min(1.0, np.max(gram)))


@log_method_call()
def omp(dictionary: Dictionary, x, s_max: int, tol: float = 0.0, return_path=False):
    """
    Orthogonal matching pursuit.

    Grows the support by the atom with the largest normalized absolute correlation with the current residual and
    refits the coefficients on the support by least squares. Stops after s_max atoms or once the residual norm drops
    to tol.

    :param return_path: when set, the residual norms of all iterations (starting with ||x||) are returned as well.
    """
    matrix = dictionary.matrix
    x = np.asarray(as_signal(x))
    if not 1 <= s_max <= dictionary.d:
        raise DomainError("Running OMP failed! Expected 1 <= s_max <= {}, got {}!".format(dictionary.d, s_max))
    if tol < 0:
        raise DomainError("Running OMP failed! Expected tol >= 0, got {}!".format(tol))
    if x.shape[0] != dictionary.n:
        raise DomainError("Running OMP failed! Signal has length {}, expected {}!".format(x.shape[0], dictionary.n))
    norms = np.where(dictionary.atom_norms > 0, dictionary.atom_norms, np.inf)

    support = []
    coefficients = np.zeros(0)
    residual = x.copy()
    residual_norms = [float(np.linalg.norm(residual))]
    while len(support) < s_max and residual_norms[-1] > tol:
        correlations = np.abs(matrix.T @ residual) / norms
        correlations[support] = -1.0
        atom = int(np.argmax(correlations))
        if correlations[atom] <= 1e-14 * residual_norms[0]:
            # The residual is orthogonal to every remaining atom.
            break
        support.append(atom)
        coefficients = scipy.linalg.lstsq(matrix[:, support], x)[0]
        residual = x - matrix[:, support] @ coefficients
        residual_norms.append(float(np.linalg.norm(residual)))

    z = np.zeros(dictionary.d)
    z[support] = coefficients
    if return_path:
        return CoefVector(z), residual_norms
    return CoefVector(z)


# Named constructors and the parameters they accept.
DICTIONARY_BUILDERS = {
    "identity": (make_identity, ("n",)),
    "duplicated-identity": (make_duplicated_identity, ("n",)),
    "gaussian": (make_gaussian, ("n", "d", "seed")),
    "haar": (make_haar_redundant, ("n", "levels")),
    "conv-pair": (make_conv_pair, ("n",)),
    "superres": (make_superres, ("n", "sigma")),
    "tv-pinv": (make_tv_pinv, ("n",)),
}


def build_dictionary(kind: str, normalize: bool = False, **params) -> Dictionary:
    """ Builds the dictionary named kind from the subset of params the constructor accepts. """
    if kind not in DICTIONARY_BUILDERS:
        raise ConstructionError("Creating dictionary failed! Unknown kind '{}'! Expected one of {}!".format(
            kind, ", ".join(sorted(DICTIONARY_BUILDERS))))
    builder, accepted = DICTIONARY_BUILDERS[kind]
    dictionary = builder(**{name: params[name] for name in accepted if name in params})
    return normalize_atoms(dictionary) if normalize else dictionary
