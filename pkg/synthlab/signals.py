"""
Recipes for the coefficient vectors (and thereby the signals x0 = D z) the experiments start from.

Every recipe takes the dictionary as first argument, is deterministic given its parameters and returns a CoefVector.
"""
import math

import numpy as np

from synthlab.dictionaries import omp
from synthlab.errors import DomainError
from synthlab.logger import Logger, log_method_call
from synthlab.models import CoefVector, Dictionary
from synthlab.utils import STREAM_SUPPORT, STREAM_VALUES, make_rng


def _check_sparsity(dictionary: Dictionary, s: int):
    if not 1 <= s <= dictionary.d:
        raise DomainError("Creating coefficients failed! Expected 1 <= s <= {}, got {}!".format(dictionary.d, s))


@log_method_call()
def random_coefficients(dictionary: Dictionary, s: int, seed: int = 0) -> CoefVector:
    """ A support of size s drawn uniformly at random carrying standard Gaussian values. """
    _check_sparsity(dictionary, s)
    support = make_rng(seed, STREAM_SUPPORT).choice(dictionary.d, size=s, replace=False)
    values = make_rng(seed, STREAM_VALUES).standard_normal(s)
    z = np.zeros(dictionary.d)
    z[np.sort(support)] = values
    return CoefVector(z)


def _low_frequency_offset(dictionary: Dictionary):
    """ Start of the scaling atoms of a Haar frame (they come last), else the first atom. """
    if dictionary.label.startswith("haar"):
        return dictionary.d - dictionary.n
    return 0


@log_method_call()
def block_coefficients(dictionary: Dictionary, s: int, seed: int = 0, offset: int = None,
                       spacing: int = None) -> CoefVector:
    """
    Two contiguous blocks of ceil(s / 2) and floor(s / 2) nonzero Gaussian coefficients.

    The first block starts at offset, the second spacing atoms later. For Haar frames the default offset places both
    blocks among the low frequency scaling atoms.
    """
    _check_sparsity(dictionary, s)
    if offset is None:
        offset = _low_frequency_offset(dictionary) + dictionary.n // 8
    if spacing is None:
        spacing = max(s, dictionary.n // 2)
    first, second = (s + 1) // 2, s // 2
    if spacing < first:
        raise DomainError("Creating coefficients failed! Blocks overlap for spacing {}!".format(spacing))
    if offset < 0 or offset + spacing + second > dictionary.d:
        raise DomainError("Creating coefficients failed! Blocks at offset {} with spacing {} exceed {} atoms!".format(
            offset, spacing, dictionary.d))
    indices = np.concatenate([np.arange(offset, offset + first), np.arange(offset + spacing, offset + spacing + second)])
    z = np.zeros(dictionary.d)
    z[indices] = make_rng(seed, STREAM_VALUES).standard_normal(s)
    return CoefVector(z)


def spike_coefficients(dictionary: Dictionary, indices, values) -> CoefVector:
    """ Explicit nonzero entries, e.g. the two neighbouring spikes of opposite sign of the super-resolution setup. """
    indices = [int(index) for index in indices]
    values = [float(value) for value in values]
    if not indices or len(indices) != len(values):
        raise DomainError("Creating coefficients failed! Expected as many values as indices, got {} and {}!".format(
            len(indices), len(values)))
    if len(set(indices)) != len(indices):
        raise DomainError("Creating coefficients failed! Indices must be distinct!")
    if min(indices) < 0 or max(indices) >= dictionary.d:
        raise DomainError("Creating coefficients failed! Indices must lie in [0, {})!".format(dictionary.d))
    z = np.zeros(dictionary.d)
    z[indices] = values
    return CoefVector(z)


def jump_signal(n: int, jumps: int) -> np.ndarray:
    """
    A piecewise constant signal with equidistant jumps and zero average.

    It samples the same step function on [0, 1) at every resolution n: the jumps sit at k / (jumps + 1) and the
    levels alternate between 0 and 1.
    """
    if jumps < 1 or n < 2 * (jumps + 1):
        raise DomainError("Creating jump signal failed! Expected 1 <= jumps and n >= 2 (jumps + 1), got {}, {}!".format(
            jumps, n))
    positions = [int(round(n * k / (jumps + 1))) for k in range(1, jumps + 1)]
    x = np.zeros(n)
    for k, position in enumerate(positions):
        x[position:] += 1.0 if k % 2 == 0 else -1.0
    return x - np.mean(x)


@log_method_call()
def jump_coefficients(dictionary: Dictionary, jumps: int = 4) -> CoefVector:
    """
    Coefficients grad x0 of a jump signal x0 with respect to D = pinv(grad).

    They are the unique minimal l1-representer since D grad x0 = x0 for zero-average x0.
    """
    if not dictionary.label.startswith("tv-pinv") or dictionary.d != dictionary.n - 1:
        raise DomainError("Creating coefficients failed! Jump signals require the TV dictionary, got '{}'!".format(
            dictionary.label))
    return CoefVector(np.diff(jump_signal(dictionary.n, jumps)))


@log_method_call()
def conv_example_coefficients(dictionary: Dictionary, x1: float = 2.0, xn: float = 1.0) -> CoefVector:
    """
    A relative interior minimal l1-representer of x0 = x1 e_1 + xn e_n for the convolutional pair.

    The minimal representers form the segment a d_1 + b d_2 + c d_{n+1} + e d_{n+2} with a = (x1 + xn) / 2 - t,
    b = t, c = (x1 - xn) / 2 - t and e = -t for t in [0, (x1 - xn) / 2]. The midpoint of the segment is returned.
    """
    if not dictionary.label.startswith("conv-pair") or dictionary.d != 2 * dictionary.n:
        raise DomainError("Creating coefficients failed! Expected the convolutional pair, got '{}'!".format(
            dictionary.label))
    if not x1 > xn > 0:
        raise DomainError("Creating coefficients failed! Expected x1 > xn > 0, got {}, {}!".format(x1, xn))
    n = dictionary.n
    t = (x1 - xn) / 4.0
    z = np.zeros(dictionary.d)
    z[0] = (x1 + xn) / 2.0 - t
    z[1] = t
    z[n] = (x1 - xn) / 2.0 - t
    z[n + 1] = -t
    return CoefVector(z)


def piecewise_smooth_signal(n: int) -> np.ndarray:
    """ A piecewise smooth signal: a sine wave with two superimposed steps. """
    t = np.arange(n) / float(n)
    return np.sin(2.0 * math.pi * t) + 1.0 * (t >= 0.3) - 0.5 * (t >= 0.7)


@log_method_call()
def omp_coefficients(dictionary: Dictionary, s: int, tol: float = 0.0) -> CoefVector:
    """ An s-sparse OMP approximation of the piecewise smooth test signal. """
    _check_sparsity(dictionary, s)
    z, residuals = omp(dictionary, piecewise_smooth_signal(dictionary.n), s, tol, return_path=True)
    Logger.get_instance().debug("OMP residual after {} atoms is {:.3g}.".format(len(residuals) - 1, residuals[-1]))
    return z


# Named recipes and the parameters they accept.
SIGNAL_RECIPES = {
    "random": (random_coefficients, ("s", "seed")),
    "blocks": (block_coefficients, ("s", "seed", "offset", "spacing")),
    "spikes": (spike_coefficients, ("indices", "values")),
    "jumps": (jump_coefficients, ("jumps",)),
    "conv-example": (conv_example_coefficients, ("x1", "xn")),
    "omp": (omp_coefficients, ("s", "tol")),
}


def build_coefficients(recipe: str, dictionary: Dictionary, **params) -> CoefVector:
    """ Builds the coefficient vector of the named recipe from the subset of params it accepts. """
    if recipe not in SIGNAL_RECIPES:
        raise DomainError("Creating coefficients failed! Unknown recipe '{}'! Expected one of {}!".format(
            recipe, ", ".join(sorted(SIGNAL_RECIPES))))
    builder, accepted = SIGNAL_RECIPES[recipe]
    return builder(dictionary, **{name: params[name] for name in accepted if params.get(name) is not None})
