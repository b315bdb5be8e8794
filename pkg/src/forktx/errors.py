"""Exception types shared across the package."""


class ForktxError(Exception):
    """Base class for all errors raised by forktx."""


class DomainError(ForktxError, ValueError):
    """A physical parameter lies outside its allowed domain."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class DimensionError(ForktxError, ValueError):
    """Matrix shapes are incompatible for the requested operation."""


class SingularMatrixError(ForktxError, ArithmeticError):
    """Matrix is singular within the relative determinant tolerance."""

    def __init__(self, message, det_magnitude, indices=None):
        super().__init__(message)
        self.det_magnitude = det_magnitude
        self.indices = indices


class SingularLoopError(SingularMatrixError):
    """The multiple-reflection loop I - M is singular at some energies.

    This happens at isolated bound-state energies that are decoupled from
    the injector lead. ``energies`` lists the offending points.
    """

    def __init__(self, message, det_magnitude, energies, indices=None):
        super().__init__(message, det_magnitude, indices)
        self.energies = energies


class ConfigError(ForktxError, ValueError):
    """A run configuration document is malformed."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
