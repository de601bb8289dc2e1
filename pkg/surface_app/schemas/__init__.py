"""Schemas module."""

from .distillation import OutcomeRow, OutcomeTable, ScalingReport, ScalingRequest, ScalingRow
from .enums import (
    BoundaryType,
    CodeFamily,
    DefectType,
    FailureType,
    IdleNoise,
    LatticeVariant,
    PauliKind,
    RotationAxis,
    StabilizerKind,
)
from .logical import InjectionReport, InjectionRequest, ScriptRecord, ScriptRequest
from .simulation import (
    BaselineCell,
    BaselineRequest,
    NoiseSettings,
    SweepCell,
    SweepConfig,
    SweepSummary,
    ThresholdEstimate,
    ThresholdRequest,
    TrialRequest,
    TrialResult,
)

__all__ = [
    "BaselineCell",
    "BaselineRequest",
    "BoundaryType",
    "CodeFamily",
    "DefectType",
    "FailureType",
    "IdleNoise",
    "InjectionReport",
    "InjectionRequest",
    "LatticeVariant",
    "NoiseSettings",
    "OutcomeRow",
    "OutcomeTable",
    "PauliKind",
    "RotationAxis",
    "ScalingReport",
    "ScalingRequest",
    "ScalingRow",
    "ScriptRecord",
    "ScriptRequest",
    "StabilizerKind",
    "SweepCell",
    "SweepConfig",
    "SweepSummary",
    "ThresholdEstimate",
    "ThresholdRequest",
    "TrialRequest",
    "TrialResult",
]
