"""Exception hierarchy shared by the solvers."""


class JamGameError(Exception):
    """Base class for every error raised by this package."""


class IntegrationError(JamGameError):
    """An expectation could not be evaluated to a finite value."""


class ConvergenceError(JamGameError):
    """A root search failed to bracket or converge.

    ``diagnostics`` carries the last bracket and residuals seen.
    """

    def __init__(self, message, **diagnostics):
        if diagnostics:
            details = ", ".join(f"{k}={v!r}" for k, v in diagnostics.items())
            message = f"{message} ({details})"
        super().__init__(message)
        self.diagnostics = diagnostics


class ResolutionError(JamGameError):
    """The quantization grid is too coarse to bracket a discrete solution."""


class StructureError(JamGameError):
    """The optimum does not have the expected threshold structure."""


class CurveRangeError(JamGameError, ValueError):
    """A curve was queried outside its sampled range with extension disabled."""


class ExistenceError(JamGameError):
    """The equilibrium existence condition fails for the given curve."""


class ConsistencyError(JamGameError):
    """Two independent evaluations of the same quantity disagree."""
