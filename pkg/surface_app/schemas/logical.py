"""Models of the defect-operation endpoints."""

from typing import Optional

from pydantic import BaseModel, Field, model_validator


class InjectionRequest(BaseModel):
    alpha_re: float = Field(default=1.0, examples=[0.6])
    alpha_im: float = 0.0
    beta_re: float = Field(default=0.0, examples=[0.0])
    beta_im: float = Field(default=0.0, examples=[0.8])
    seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _check_norm(self) -> "InjectionRequest":
        norm = self.alpha_re ** 2 + self.alpha_im ** 2 + self.beta_re ** 2 + self.beta_im ** 2
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm}")
        return self

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    @property
    def beta(self) -> complex:
        return complex(self.beta_re, self.beta_im)


class InjectionReport(BaseModel):
    m_x: int
    m_z: int
    fidelity: float = Field(ge=0, le=1)
    stabilizers: dict[str, list[str]] = Field(
        description="Final stabilizer list of the fragment for the alpha and beta branches."
    )


class ScriptRequest(BaseModel):
    script: str = Field(
        description="YAML document with a `lattice` block and a list of `steps`.",
        examples=[
            "lattice: {width: 6, height: 4, seed: 1}\n"
            "steps:\n"
            "  - {op: create_smooth, name: q, regions: [[[1, 1]], [[1, 4]]]}\n"
            "  - {op: expect, qubit: q, basis: Z}\n"
        ],
    )


class ScriptRecord(BaseModel):
    step: int
    op: str
    qubit: Optional[str] = None
    value: int | list[int]
