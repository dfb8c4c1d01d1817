"""Exception hierarchy.

The CLI maps :class:`UsageError` to exit status 2 and :class:`ComputeError`
to exit status 1.
"""


class GCenterError(Exception):
    """Base class for all package errors."""


class UsageError(GCenterError, ValueError):
    """Invalid input, unit, configuration or out-of-domain argument."""


class CalibrationError(UsageError):
    """A calibration target cannot be reached with the allowed parameters."""


class ComputeError(GCenterError, RuntimeError):
    """A numerical procedure failed (non-finite data, non-convergence)."""


class BracketError(ComputeError):
    """Root bracket does not contain a sign change."""


class FitError(ComputeError):
    """Nonlinear solve did not converge.

    The last (best) iterate is kept on ``last_iterate`` so callers can
    report how far the solver got.
    """

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual
