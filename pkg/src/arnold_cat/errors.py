"""Exception hierarchy shared by all modules."""


class ArnoldError(Exception):
    """Base class for every error raised by arnold_cat."""


class ValidationError(ArnoldError, ValueError):
    """Invalid input: bad parameters, bad configuration, unsupported case."""


class NotMultiWellError(ValidationError):
    """The coupling set does not describe an N-barrier potential."""


class DivisibilityError(ValidationError):
    """A weight tuple leaves a coupling formula with fractional coefficients."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NumericalError(ArnoldError, RuntimeError):
    """A numerical procedure failed or produced untrustworthy output."""


class BoundaryLeakError(NumericalError):
    """Eigenfunctions do not decay before the box edge."""


class NoCatastropheError(NumericalError):
    """No sign change of the energy gap on the requested interval."""
