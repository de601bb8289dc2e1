"""Surface code simulation service."""

import asyncio
import hashlib
import json

import numpy as np
from loguru import logger

from storage.caching import caching_service
from surface_app.exceptions import ConfigError
from surface_app.schemas import (
    BaselineCell,
    BaselineRequest,
    CodeFamily,
    InjectionReport,
    InjectionRequest,
    LatticeVariant,
    OutcomeTable,
    ScalingReport,
    ScalingRequest,
    ScriptRecord,
    ScriptRequest,
    SweepConfig,
    SweepSummary,
    ThresholdEstimate,
    ThresholdRequest,
    TrialRequest,
    TrialResult,
)

from .constants import MAX_API_CYCLES, MAX_API_SHOTS, MAX_API_TRIALS, MAX_DUMP_DISTANCE
from .helpers import logical_ops, magic_lab, planar_lattice, threshold
from .helpers.noise_model import NoiseParams


def _sweep_key(sweep_config: SweepConfig) -> dict:
    payload = json.dumps(sweep_config.model_dump(mode="json", exclude={"workers"}), sort_keys=True)
    return {"config": hashlib.sha256(payload.encode()).hexdigest()[:16]}


class SurfaceService:
    """Surface code service."""

    async def run_trial(self, request: TrialRequest) -> TrialResult:
        """Single lifetime trial at one distance."""
        if request.max_cycles > MAX_API_CYCLES:
            raise ConfigError(f"max_cycles above {MAX_API_CYCLES}, use the command line for long runs")
        noise = NoiseParams.from_mapping(request.noise.as_mapping())
        return await asyncio.to_thread(
            threshold.run_trial,
            request.distance,
            noise,
            request.seed,
            request.max_cycles,
            request.t_freeze,
            request.idle_noise,
            request.readout_idle_noise,
        )

    async def run_sweep(self, sweep_config: SweepConfig) -> SweepSummary:
        """Sweep over distances and error rates; finished sweeps are cached by configuration."""
        if sweep_config.trials > MAX_API_TRIALS:
            raise ConfigError(f"more than {MAX_API_TRIALS} trials per cell, use the command line for long runs")
        key = _sweep_key(sweep_config)
        cached = caching_service.load_recent("sweep", key)
        if cached:
            return SweepSummary.model_validate(cached)
        summary = await asyncio.to_thread(threshold.sweep, sweep_config)
        caching_service.save_with_cleanup(summary.model_dump(mode="json"), "sweep", key)
        return summary

    async def estimate_threshold(self, request: ThresholdRequest) -> ThresholdEstimate:
        """Crossing of the lifetime curves of a finished sweep."""
        frame = threshold.cells_frame(request.cells)
        return await asyncio.to_thread(threshold.estimate_threshold, frame, request.bootstrap, request.seed)

    async def run_baseline(self, request: BaselineRequest) -> list[BaselineCell]:
        """Lifetimes of an unprotected qubit."""
        return await asyncio.to_thread(
            threshold.baseline_sweep, request.ps, request.trials, request.seed, request.max_cycles
        )

    def lattice_dump(self, distance: int, variant: LatticeVariant = LatticeVariant.MIXED) -> str:
        """Text dump of a lattice; the all-smooth variant uses distance x distance faces."""
        if distance > MAX_DUMP_DISTANCE:
            raise ConfigError(f"dump is limited to distance {MAX_DUMP_DISTANCE}")
        if variant == LatticeVariant.ALL_SMOOTH:
            lattice = planar_lattice.build_all_smooth_lattice(distance, distance)
        else:
            lattice = planar_lattice.build_lattice(distance)
        return planar_lattice.dump(lattice)

    async def distillation_table(self, code: CodeFamily) -> OutcomeTable:
        """Measurement patterns, probabilities and corrections for perfect inputs."""
        return await asyncio.to_thread(magic_lab.acceptance_table, code)

    async def distillation_scaling(self, request: ScalingRequest) -> ScalingReport:
        """Output error against input error for the requested codes."""
        if request.shots > MAX_API_SHOTS:
            raise ConfigError(f"more than {MAX_API_SHOTS} shots, use the command line for long runs")
        return await asyncio.to_thread(
            magic_lab.scaling_report, request.codes, request.ps, request.shots, request.seed, request.workers
        )

    def inject(self, request: InjectionRequest) -> InjectionReport:
        """State injection into the nine-qubit fragment."""
        rng = np.random.default_rng(request.seed)
        result = logical_ops.inject_state(request.alpha, request.beta, rng)
        logger.info(f"Injection outcomes m_x={result.m_x} m_z={result.m_z}, fidelity {result.fidelity:.12f}")
        return InjectionReport(
            m_x=result.m_x, m_z=result.m_z, fidelity=min(result.fidelity, 1.0), stabilizers=result.tables
        )

    async def run_script(self, request: ScriptRequest) -> list[ScriptRecord]:
        """Executes a YAML script of defect operations."""
        records = await asyncio.to_thread(logical_ops.run_script, request.script)
        return [ScriptRecord(**record) for record in records]


surface_service = SurfaceService()
