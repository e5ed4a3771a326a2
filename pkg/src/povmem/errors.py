"""Exception hierarchy shared across the package."""


class PovmemError(Exception):
    """Base class for all errors raised by this package."""


class SamplingError(PovmemError):
    """A mode, mask or transform would violate the grid's sampling limits."""


class GridMismatchError(PovmemError):
    """Two fields that must share a grid were sampled on different grids."""


class DegenerateFieldError(PovmemError):
    """A field carries no usable power for the requested operation."""


class RegimeViolationError(PovmemError):
    """Parameters fall outside the validity regime of an analytic approximation."""


class NotOnSphereError(PovmemError):
    """A two-mode ket is not of the separable form a sphere point requires."""


class InvalidStateError(PovmemError):
    """A matrix fails the density-matrix invariants (Hermitian, trace one, PSD)."""


class SingularFrameError(PovmemError):
    """A measurement frame is not informationally complete."""


class DomainError(PovmemError):
    """A scalar argument lies outside the mathematical domain of an operation."""


class ConfigError(PovmemError):
    """An experiment configuration failed to parse or validate."""
