"""Exception hierarchy for heterosync.

All library errors derive from :class:`HeterosyncError` so callers can
catch everything from this package with a single except clause.
"""


class HeterosyncError(Exception):
    """Base class for all errors raised by heterosync."""


class ArgumentError(HeterosyncError):
    """An argument is malformed: wrong shape, wrong range, inconsistent sizes."""


class AssumptionError(HeterosyncError):
    """A structural hypothesis fails: disconnected graph, unstabilizable pair,
    spectral-gap condition violated, empty coupling interval."""


class ConvergenceError(HeterosyncError):
    """An iterative procedure ran out of iterations before meeting its tolerance."""


class NumericalError(HeterosyncError):
    """Floating-point trouble: overflow during simulation, loss of definiteness."""
