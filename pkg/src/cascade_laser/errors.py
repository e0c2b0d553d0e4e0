"""Exception hierarchy shared by every module."""


class CascadeLaserError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CascadeLaserError, ValueError):
    """An input lies outside the domain of a model quantity."""


class StabilityError(CascadeLaserError):
    """A steady-state quantity was requested at or above threshold."""


class FormulaValidityError(CascadeLaserError):
    """A closed-form expression produced an unphysical value."""


class TruncationError(CascadeLaserError):
    """The Fock-space truncation is too small for the evolved state.

    Attributes
    ----------
    required_n_max : int
        Suggested truncation level for a retry.
    """

    def __init__(self, message, required_n_max):
        super().__init__(message)
        self.required_n_max = required_n_max


class ConfigError(CascadeLaserError):
    """Invalid run configuration (unknown key, bad value, violated invariant)."""
