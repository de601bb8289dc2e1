"""
Exceptions module goal is to create custom exceptions in order to raise propper errors,
which will make understandable problems for users.
"""

from .base import (
    BaseError,
    ConfigError,
    FixtureError,
    LatticeError,
    MatchingError,
    NoCrossingError,
    PauliAlgebraError,
    ScheduleError,
    StateVectorError,
)

__all__ = [
    "BaseError",
    "ConfigError",
    "FixtureError",
    "LatticeError",
    "MatchingError",
    "NoCrossingError",
    "PauliAlgebraError",
    "ScheduleError",
    "StateVectorError",
]
