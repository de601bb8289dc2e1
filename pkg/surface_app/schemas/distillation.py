"""Models of the distillation tables and the error-scaling report."""

from typing import Optional

from pydantic import BaseModel, Field

from .enums import CodeFamily, PauliKind


class OutcomeRow(BaseModel):
    pattern: str = Field(examples=["010101"])
    probability: float = Field(ge=0, le=1)
    correction: PauliKind
    output: str = Field(examples=["|Y>"])
    fidelity: float = Field(ge=0, le=1)


class OutcomeTable(BaseModel):
    code: CodeFamily
    rows: list[OutcomeRow]

    @property
    def total_probability(self) -> float:
        return sum(row.probability for row in self.rows)


class ScalingRow(BaseModel):
    code: CodeFamily
    p: float
    coefficient: float
    exhaustive: float
    mc_estimate: float
    mc_sigma: float
    acceptance_rate: float


class ScalingRequest(BaseModel):
    codes: list[CodeFamily] = Field(default=[CodeFamily.STEANE, CodeFamily.REED_MULLER], min_length=1)
    ps: list[float] = Field(default=[0.01], min_length=1, examples=[[0.005, 0.01, 0.02]])
    shots: int = Field(default=2000, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)


class ScalingReport(BaseModel):
    rows: list[ScalingRow]
    csv: str
