import functools
import logging
import sys

import numpy as np
from colorama import Fore

from synthlab.utils import colorize


def _summarize(value):
    """ Short representation of an argument; arrays and array-backed models are shown by shape. """
    if isinstance(value, np.ndarray):
        return "array{}".format(value.shape)
    shape = getattr(value, "shape", None)
    if shape is not None and not isinstance(value, (int, float)):
        return "{}{}".format(value.__class__.__name__, tuple(shape))
    text = repr(value)
    return text if len(text) <= 80 else text[:77] + "..."


def log_method_call():
    """
    A decorator for logging calls of top-level operations.

    It logs the name of the function and a summary of its arguments before the call is executed.
    """

    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            logger = Logger.get_instance()
            if logger.level <= logging.DEBUG:
                args_repr = [_summarize(a) for a in args]
                kwargs_repr = [f"{k}={_summarize(v)}" for k, v in kwargs.items()]
                signature = ", ".join(args_repr + kwargs_repr)
                logger.debug(f"Calling {func.__name__}({signature})")
            return func(*args, **kwargs)

        return wrapper

    return decorator


class Logger:

    # Static logger instance
    _instance = None

    app_id = "synthlab"
    log_format = "%(msg)s"

    @staticmethod
    def get_instance():
        if Logger._instance is None:
            # Library use without the command line front end.
            Logger._instance = Logger(Logger.app_id, Logger.log_format, logging.WARN)
        return Logger._instance

    @staticmethod
    def initialize(app_id, log_format, level):
        if Logger._instance is not None:
            Logger._instance.level = level
            return Logger._instance
        Logger._instance = Logger(app_id, log_format, level)
        return Logger._instance

    def __init__(self, app_id, log_format, level):
        self.logger = logging.getLogger(app_id)
        self.logger.propagate = False
        self.handler = logging.StreamHandler(sys.stderr)
        self.handler.setFormatter(logging.Formatter(log_format))
        self.logger.addHandler(self.handler)
        self._set_level(level)

    def _set_level(self, level):
        self.logger.setLevel(level)
        self.handler.setLevel(level)

    def _get_level(self):
        return self.logger.level

    def info(self, message):
        self.logger.info(colorize(" INFO: ", Fore.GREEN) + message)

    def debug(self, message):
        self.logger.debug(colorize("DEBUG: {}".format(message), Fore.LIGHTBLACK_EX))

    def warning(self, message):
        self.logger.warning(colorize(" WARN: ", Fore.LIGHTYELLOW_EX) + message)

    def error(self, message):
        self.logger.error(colorize("ERROR: ", Fore.RED) + message)

    level = property(fset=_set_level, fget=_get_level)
