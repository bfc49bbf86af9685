import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from colorama import Fore, Style
from iterfzf import iterfzf

# Streams of random numbers which must never overlap.
STREAM_SUPPORT = 1
STREAM_VALUES = 2
STREAM_MEASUREMENTS = 3
STREAM_NOISE = 4
STREAM_WIDTH = 5
STREAM_PERTURBATION = 6


def colorize(string: str, color):
    """ Colorize a string. """
    return color + string + Style.RESET_ALL


def safe_join_path(*argv):
    """
    os.path.join does ignore everything prior to a component starting with a slash.
    This implementation does consider all components and normalizes the path.
    """
    return os.path.normpath(os.sep.join(argv))


def derive_seed(master_seed: int, *keys: int) -> int:
    """
    Derives a child seed from the master seed and a tuple of non-negative integer keys.

    The derivation is counter based, so the result does not depend on the order in which work items are executed.
    """
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(key) for key in keys))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """ A generator for the given seed, optionally split by keys. """
    if keys:
        return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(key) for key in keys)))
    return np.random.default_rng(int(seed))


def format_float(value) -> str:
    """ Formats a float with 17 significant digits (lossless for float64); None and NaN become empty fields. """
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def parse_float(text: str):
    """ Inverse of format_float. """
    return None if text == "" else float(text)


def is_interactive():
    return sys.stdin.isatty() and sys.stdout.isatty()


def select_name(names, query=None):
    """ Lets the user pick one of the names using iterfzf. Returns None when nothing was selected. """
    if not names:
        return None
    return iterfzf(sorted(names), query=query)


def parallel_map(function, items, threads=1):
    """ Maps function over items on up to threads worker threads. Results keep the order of items. """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))
