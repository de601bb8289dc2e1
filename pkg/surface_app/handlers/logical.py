"""Logical qubit handlers are defined here."""

import yaml
from fastapi import Body

from ..exceptions import BaseError
from ..exceptions.http_exception_wrapper import http_exception, http_from_domain
from ..logic import surface_service
from ..schemas import InjectionReport, InjectionRequest, ScriptRecord, ScriptRequest
from .routers import logical_router


@logical_router.post(
    "/injection",
    response_model=InjectionReport,
    description=(
            "Injects alpha|0_L> + beta|1_L> into the nine-qubit fragment on the statevector backend. "
            "Returns both measurement outcomes, the fidelity with the ideal encoded state and the final "
            "stabilizer lists of the two branches."
    ),
)
async def post_injection(request: InjectionRequest = Body(...)) -> InjectionReport:
    try:
        return surface_service.inject(request)
    except BaseError as e:
        raise http_from_domain(e, request.model_dump(mode="json"))


@logical_router.post(
    "/script",
    response_model=list[ScriptRecord],
    description=(
            "Runs a YAML script of defect operations (create_smooth, create_rough, move, braid, cnot, "
            "hadamard, measure, prepare, apply, remove, reference, expect) and returns every recorded value."
    ),
)
async def post_script(request: ScriptRequest = Body(...)) -> list[ScriptRecord]:
    # BaseError subclasses KeyError, so it has to be caught first
    try:
        return await surface_service.run_script(request)
    except BaseError as e:
        raise http_from_domain(e)
    except (AttributeError, KeyError, TypeError, ValueError, yaml.YAMLError) as e:
        raise http_exception(422, f"Malformed script: {e!r}")
