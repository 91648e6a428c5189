"""Exception hierarchy.

Everything raised on purpose by this package derives from
:class:`MaxBoundsError`, so callers (and the CLI) can tell configuration and
domain problems apart from genuine bugs.
"""


class MaxBoundsError(Exception):
    pass


class DomainError(MaxBoundsError, ValueError):
    """An argument lies outside the set where a formula is defined."""


class OutOfRegimeError(DomainError):
    """A bound was requested outside the range where it is asserted to hold."""


class RangeError(MaxBoundsError, OverflowError):
    """The result is mathematically finite but not representable as a float."""


class ConfigError(MaxBoundsError, ValueError):
    pass


class GenerationError(MaxBoundsError, RuntimeError):
    """Path generation failed, e.g. a covariance matrix that is not positive definite."""
