"""Magic state distillation handlers are defined here."""

from fastapi import Body, Path

from ..exceptions import BaseError
from ..exceptions.http_exception_wrapper import http_from_domain
from ..logic import surface_service
from ..schemas import CodeFamily, OutcomeTable, ScalingReport, ScalingRequest
from .routers import distillation_router


@distillation_router.get(
    "/table/{code}",
    response_model=OutcomeTable,
    description=(
            "Every measurement pattern of the decoding circuit for perfect inputs (|Y> for steane, "
            "|A> for reed-muller) with its probability and the Pauli correction that restores the output."
    ),
)
async def get_distillation_table(
        code: CodeFamily = Path(..., description="steane or reed-muller"),
) -> OutcomeTable:
    try:
        return await surface_service.distillation_table(code)
    except BaseError as e:
        raise http_from_domain(e, code.value)


@distillation_router.post(
    "/scaling",
    response_model=ScalingReport,
    description=(
            "Output error probability against input error p (0 <= p <= 0.05): the exhaustive low-weight "
            "coefficient, a Monte Carlo estimate with its sigma and the acceptance rate, one row per (code, p)."
    ),
)
async def post_distillation_scaling(request: ScalingRequest = Body(...)) -> ScalingReport:
    try:
        return await surface_service.distillation_scaling(request)
    except BaseError as e:
        raise http_from_domain(e, request.model_dump(mode="json"))
