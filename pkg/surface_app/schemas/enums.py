"""Enumerations shared by the simulation logic and the API models are defined here."""

from enum import Enum


class PauliKind(str, Enum):
    I: str = "I"
    X: str = "X"
    Y: str = "Y"
    Z: str = "Z"


class BoundaryType(str, Enum):
    SMOOTH: str = "smooth"
    ROUGH: str = "rough"


class StabilizerKind(str, Enum):
    Z: str = "Z"
    X: str = "X"


class FailureType(str, Enum):
    LOGICAL_X: str = "logical-X"
    LOGICAL_Z: str = "logical-Z"


class IdleNoise(str, Enum):
    ALL: str = "all"
    DATA_ONLY: str = "data-only"


class LatticeVariant(str, Enum):
    MIXED: str = "mixed"
    ALL_SMOOTH: str = "all-smooth"


class CodeFamily(str, Enum):
    STEANE: str = "steane"
    REED_MULLER: str = "reed-muller"


class RotationAxis(str, Enum):
    Z: str = "Z"
    X: str = "X"


class DefectType(str, Enum):
    SMOOTH: str = "smooth"
    ROUGH: str = "rough"
