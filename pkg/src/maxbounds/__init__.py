"""Maximal inequalities for processes with Holder-type increment control.

Closed-form constants (:mod:`.constants`), samplers for fractional Brownian
motion, a random-walk martingale and Rademacher series (:mod:`.processes`),
pathwise statistics (:mod:`.estimators`), the bounds themselves
(:mod:`.bounds`) and Monte Carlo experiments comparing the two
(:mod:`.verify`).
"""
__version__ = "0.1.0"

from .errors import ConfigError, DomainError, GenerationError, MaxBoundsError, OutOfRegimeError, RangeError
from .kernels import BACKEND

__all__ = [
    "__version__",
    "BACKEND",
    "MaxBoundsError",
    "DomainError",
    "OutOfRegimeError",
    "RangeError",
    "ConfigError",
    "GenerationError",
]
