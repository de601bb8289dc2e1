"""Request and response models of the threshold experiment are defined here."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .enums import FailureType, IdleNoise


class NoiseSettings(BaseModel):
    """Either a common rate `p` or individual overrides."""

    p: Optional[float] = Field(default=None, ge=0, le=1)
    p_i: Optional[float] = Field(default=None, ge=0, le=1)
    p_r: Optional[float] = Field(default=None, ge=0, le=1)
    p_m: Optional[float] = Field(default=None, ge=0, le=1)
    p_g: Optional[float] = Field(default=None, ge=0, le=1)

    def as_mapping(self) -> dict[str, float]:
        return {k: v for k, v in self.model_dump().items() if v is not None}


class TrialRequest(BaseModel):
    distance: int = Field(ge=2, examples=[3])
    noise: NoiseSettings
    seed: int = Field(default=0, ge=0)
    max_cycles: int = Field(default=10_000, ge=1)
    t_freeze: int = Field(default=20, ge=1)
    idle_noise: IdleNoise = IdleNoise.ALL
    readout_idle_noise: bool = True


class TrialResult(BaseModel):
    distance: int
    p: float
    seed: int
    cycles_to_failure: int = Field(ge=1)
    failure_type: Optional[FailureType] = None
    censored: bool = False
    divergences: int = 0


class SweepConfig(BaseModel):
    distances: list[int] = Field(min_length=1, examples=[[3, 5, 7]])
    ps: list[float] = Field(min_length=1, examples=[[0.003, 0.006, 0.012]])
    trials: int = Field(ge=1, examples=[200])
    max_cycles: int = Field(default=100_000, ge=1)
    seed: int = Field(default=0, ge=0)
    t_freeze: int = Field(default=20, ge=1)
    idle_noise: IdleNoise = IdleNoise.ALL
    readout_idle_noise: bool = True
    workers: Optional[int] = Field(default=None, ge=1)

    model_config = {"extra": "forbid"}

    @field_validator("distances")
    @classmethod
    def _check_distances(cls, value: list[int]) -> list[int]:
        if any(d < 2 for d in value):
            raise ValueError("distances must be at least 2")
        return value

    @field_validator("ps")
    @classmethod
    def _check_ps(cls, value: list[float]) -> list[float]:
        if any(not 0 <= p <= 1 for p in value):
            raise ValueError("error rates must lie in [0, 1]")
        return value

    @staticmethod
    def log_grid(p_min: float, p_max: float, p_steps: int) -> list[float]:
        if p_steps == 1:
            return [float(p_min)]
        return [float(p) for p in np.geomspace(p_min, p_max, p_steps)]


class SweepCell(BaseModel):
    d: int
    p: float
    trials: int
    mean: float
    stderr: float
    censored_count: int
    lower_bound: bool


class SweepSummary(BaseModel):
    cells: list[SweepCell]
    csv: str


class ThresholdRequest(BaseModel):
    cells: list[SweepCell] = Field(min_length=1)
    bootstrap: int = Field(default=1000, ge=0)
    seed: int = Field(default=0, ge=0)


class ThresholdEstimate(BaseModel):
    p_th: float
    ci_low: float
    ci_high: float
    crossings: list[float]


class BaselineRequest(BaseModel):
    ps: list[float] = Field(min_length=1)
    trials: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0)
    max_cycles: int = Field(default=100_000, ge=1)


class BaselineCell(BaseModel):
    p: float
    trials: int
    mean: float
    stderr: float
