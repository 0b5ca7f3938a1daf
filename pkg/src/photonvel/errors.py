"""Exception hierarchy shared by the compute modules and the CLI.

Each class carries the CLI exit code it maps to.
"""


class PhotonVelError(Exception):
    exit_code = 4


class InvalidArgumentError(PhotonVelError, ValueError):
    exit_code = 2


class OutOfDomainError(InvalidArgumentError):
    """Spectral amplitude requested in the evanescent region k_perp > k."""


class NumericError(PhotonVelError, ArithmeticError):
    exit_code = 3


class AccuracyLossError(NumericError):
    """Quadrature truncation discarded more mass than allowed."""


class DegenerateError(NumericError):
    """A normalising integral (norm, mean momentum) vanished."""


class TruncationError(NumericError):
    """Field leaks out of the integration window."""


class ResolutionError(NumericError):
    """Sampling too coarse for the requested operation (e.g. phase unwrapping)."""


class InvariantViolation(PhotonVelError):
    exit_code = 4
