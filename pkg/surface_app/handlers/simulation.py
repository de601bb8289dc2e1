"""Threshold experiment handlers are defined here."""

from fastapi import Body

from ..exceptions import BaseError
from ..exceptions.http_exception_wrapper import http_from_domain
from ..logic import surface_service
from ..schemas import (
    BaselineCell,
    BaselineRequest,
    SweepConfig,
    SweepSummary,
    ThresholdEstimate,
    ThresholdRequest,
    TrialRequest,
    TrialResult,
)
from .routers import simulation_router


@simulation_router.post(
    "/trial",
    response_model=TrialResult,
    description=(
            "Runs one memory trial: noisy syndrome extraction cycles on a distance-d planar code, each "
            "followed by decoding and a perfect-readout check, until a logical error appears. "
            "Returns the failing cycle, or a censored result when max_cycles is reached."
    ),
)
async def post_trial(request: TrialRequest = Body(...)) -> TrialResult:
    try:
        return await surface_service.run_trial(request)
    except BaseError as e:
        raise http_from_domain(e, request.model_dump(mode="json"))


@simulation_router.post(
    "/sweep",
    response_model=SweepSummary,
    description=(
            "Runs `trials` memory trials for every (distance, p) cell. Every trial draws from its own "
            "random stream derived from the master seed, so the CSV does not depend on the worker count. "
            "Censored cells are flagged as lower bounds."
    ),
)
async def post_sweep(sweep_config: SweepConfig = Body(...)) -> SweepSummary:
    try:
        return await surface_service.run_sweep(sweep_config)
    except BaseError as e:
        raise http_from_domain(e, sweep_config.model_dump(mode="json"))


@simulation_router.post(
    "/threshold",
    response_model=ThresholdEstimate,
    description=(
            "Estimates the threshold from sweep cells: linear fits of log(mean lifetime) against log(p) per "
            "distance, median of the pairwise crossings, bootstrap confidence interval. "
            "Needs at least 2 distances and 4 error rates; 409 when the curves do not cross."
    ),
)
async def post_threshold(request: ThresholdRequest = Body(...)) -> ThresholdEstimate:
    try:
        return await surface_service.estimate_threshold(request)
    except BaseError as e:
        raise http_from_domain(e, {"cells": len(request.cells)})


@simulation_router.post(
    "/baseline",
    response_model=list[BaselineCell],
    description="Mean lifetime of a single unprotected qubit under the same memory noise.",
)
async def post_baseline(request: BaselineRequest = Body(...)) -> list[BaselineCell]:
    try:
        return await surface_service.run_baseline(request)
    except BaseError as e:
        raise http_from_domain(e, request.model_dump(mode="json"))
