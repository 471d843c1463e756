"""Exception types shared across the package."""


class FracsimError(Exception):
    """Base class for all package errors."""


class ValidationError(FracsimError):
    """A parameter or input violates its documented range or structure."""


class AccuracyError(FracsimError):
    """A numerical routine could not reach the requested accuracy.

    Carries the best residual achieved so callers can decide whether the
    partial accuracy is still usable.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
