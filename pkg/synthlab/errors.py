class SynthlabError(Exception):
    """ Base class of all errors raised by synthlab. """


class DomainError(SynthlabError, ValueError):
    """ An argument lies outside the domain of the requested operation. """


class ConstructionError(DomainError):
    """ A dictionary can not be built from the supplied parameters. """


class ConfigError(DomainError):
    """ The run configuration is invalid. """


class NumericalError(SynthlabError):
    """ A numerical identity which should hold does not hold within tolerance. """


class InfeasibleError(SynthlabError):
    """ The constraint set of an optimization problem is empty. """


class InconsistencyError(SynthlabError):
    """ Independent computations of the same quantity disagree. """


class ConvergenceError(SynthlabError):
    """
    An iterative method did not reach its stopping criterion.

    best:   the best iterate found so far (may be None).
    report: a dict with diagnostic values (e.g. KKT violation, certificate gap, iterations).
    """

    def __init__(self, message, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report or {}


class NotPointedError(ConvergenceError):
    """ The cone is not strictly pointed within tolerance. """


class ProjectionError(ConvergenceError):
    """ A cone projection failed while sampling. """

    def __init__(self, message, sample_index, best=None, report=None):
        super().__init__(message, best, report)
        self.sample_index = sample_index
