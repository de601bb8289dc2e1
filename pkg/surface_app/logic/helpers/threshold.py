"""Monte Carlo lifetime trials, parameter sweeps and threshold estimation."""

from __future__ import annotations

from typing import Mapping

import numpy as np
import pandas as pd
from loguru import logger
from pandarallel import pandarallel

from surface_app.config import config
from surface_app.exceptions import ConfigError, NoCrossingError
from surface_app.schemas.enums import FailureType, IdleNoise
from surface_app.schemas.simulation import BaselineCell, SweepCell, SweepConfig, SweepSummary, ThresholdEstimate, \
    TrialResult
from .decoder import SurfaceDecoder
from .frame_simulator import ErrorFrame, FrameSimulator, SyndromeTrace, detection_events, inject_pauli, \
    logical_failure
from .noise_model import NoiseParams, memory_layer, trial_rng
from .planar_lattice import build_lattice, build_schedule

pandarallel.initialize(progress_bar=False, nb_workers=config.get_int("NB_WORKERS", 4), verbose=0)

CSV_COLUMNS = ["d", "p", "trials", "mean", "stderr", "censored_count"]
STEPS_PER_CYCLE = 6


def _representative_p(noise: NoiseParams) -> float:
    return max(noise.p_i, noise.p_r, noise.p_m, noise.p_g)


def run_trial(
        d: int,
        noise: NoiseParams,
        seed: int,
        max_cycles: int,
        t_freeze: int = 20,
        idle_noise: IdleNoise = IdleNoise.ALL,
        readout_idle_noise: bool = True,
        verify: bool = False,
        rng: np.random.Generator | None = None,
        initial_errors: Mapping[int, str] | None = None,
) -> TrialResult:
    """
    Runs noisy extraction cycles until a perfect-readout check finds a logical error.

    After every noisy cycle the decoder matches all events so far together with the
    events of one noiseless cycle, the correction is applied to a copy of the frame and
    the copy's logical parities are inspected. The copy is then dropped, so the noisy
    run continues from the uncorrected state.

    Args:
        d: code distance.
        noise: error rates.
        seed: master seed, used when `rng` is not given.
        max_cycles: cap after which the trial is reported as censored.
        initial_errors: data-qubit Paulis injected before the first cycle.

    Returns:
        TrialResult with the first failing cycle, or censored=True at max_cycles.
    """
    if max_cycles < 1:
        raise ConfigError(f"max_cycles must be positive, got {max_cycles}")
    lattice = build_lattice(d)
    simulator = FrameSimulator(lattice, build_schedule(lattice), noise, idle_noise, readout_idle_noise)
    rng = rng if rng is not None else trial_rng(seed)
    frame = ErrorFrame.clean(lattice)
    for qubit, pauli in (initial_errors or {}).items():
        inject_pauli(frame, qubit, pauli)
    decoder = SurfaceDecoder(lattice, t_freeze, verify)
    p = _representative_p(noise)
    prev = None
    for t in range(1, max_cycles + 1):
        record = simulator.run_cycle(frame, rng)
        decoder.update(detection_events(prev, record), t)
        prev = record
        check = frame.copy()
        perfect = simulator.perfect_cycle(check)
        decoder.apply(check, detection_events(record, perfect))
        failure = logical_failure(check, lattice)
        if failure is not None:
            return TrialResult(
                distance=d, p=p, seed=seed, cycles_to_failure=t, failure_type=failure,
                divergences=decoder.divergences,
            )
    return TrialResult(
        distance=d, p=p, seed=seed, cycles_to_failure=max_cycles, censored=True, divergences=decoder.divergences
    )


def run_baseline(noise: NoiseParams, seed: int, max_cycles: int, rng: np.random.Generator | None = None) -> TrialResult:
    """Lifetime of one unprotected qubit under the memory channel, six idle steps per cycle."""
    rng = rng if rng is not None else trial_rng(seed)
    x = z = 0
    for t in range(1, max_cycles + 1):
        ex, ez = memory_layer(noise.p_m, STEPS_PER_CYCLE, rng)
        x ^= int(np.bitwise_xor.reduce(ex))
        z ^= int(np.bitwise_xor.reduce(ez))
        if x or z:
            failure = FailureType.LOGICAL_X if x else FailureType.LOGICAL_Z
            return TrialResult(distance=1, p=noise.p_m, seed=seed, cycles_to_failure=t, failure_type=failure)
    return TrialResult(distance=1, p=noise.p_m, seed=seed, cycles_to_failure=max_cycles, censored=True)


def record_trace(
        d: int,
        noise: NoiseParams,
        seed: int,
        cycles: int,
        idle_noise: IdleNoise = IdleNoise.ALL,
        readout_idle_noise: bool = True,
) -> SyndromeTrace:
    """Noisy extraction cycles without decoding, kept for later replay."""
    if cycles < 1:
        raise ConfigError(f"cycles must be positive, got {cycles}")
    lattice = build_lattice(d)
    simulator = FrameSimulator(lattice, build_schedule(lattice), noise, idle_noise, readout_idle_noise)
    rng = trial_rng(seed)
    frame = ErrorFrame.clean(lattice)
    trace = SyndromeTrace(d, noise, seed, lattice.n_z, lattice.n_x)
    for _ in range(cycles):
        trace.append(simulator.run_cycle(frame, rng))
    logger.info(f"Recorded {cycles} cycles at d={d}")
    return trace


def trial_specs(sweep_config: SweepConfig) -> pd.DataFrame:
    rows = [
        {"d": d, "p_idx": i, "p": p, "trial": k}
        for d in sweep_config.distances
        for i, p in enumerate(sweep_config.ps)
        for k in range(sweep_config.trials)
    ]
    return pd.DataFrame(rows, columns=["d", "p_idx", "p", "trial"])


def _spec_runner(sweep_config: SweepConfig):
    def run(row: pd.Series) -> pd.Series:
        rng = trial_rng(sweep_config.seed, int(row["d"]), int(row["p_idx"]), int(row["trial"]))
        result = run_trial(
            int(row["d"]), NoiseParams.uniform(float(row["p"])), sweep_config.seed, sweep_config.max_cycles,
            sweep_config.t_freeze, sweep_config.idle_noise, sweep_config.readout_idle_noise, rng=rng,
        )
        return pd.Series({
            "cycles": result.cycles_to_failure,
            "censored": result.censored,
            "failure_type": result.failure_type.value if result.failure_type else "",
        })
    return run


def summarize(results: pd.DataFrame) -> pd.DataFrame:
    """
    Aggregates per-trial rows (d, p, cycles, censored) into one row per cell.

    Censored trials enter the mean at their cap, so such means are lower bounds.
    """
    grouped = results.groupby(["d", "p"], sort=True)
    summary = grouped.agg(
        trials=("cycles", "size"),
        mean=("cycles", "mean"),
        std=("cycles", "std"),
        censored_count=("censored", "sum"),
    ).reset_index()
    summary["stderr"] = (summary["std"].fillna(0.0) / np.sqrt(summary["trials"])).astype(float)
    summary["censored_count"] = summary["censored_count"].astype(int)
    return summary[CSV_COLUMNS]


def sweep_frame(sweep_config: SweepConfig) -> pd.DataFrame:
    min_trials = config.get_int("MIN_TRIALS", 1)
    if sweep_config.trials < min_trials:
        raise ConfigError(f"{sweep_config.trials} trials per cell, at least {min_trials} required")
    specs = trial_specs(sweep_config)
    workers = sweep_config.workers or config.get_int("NB_WORKERS", 1)
    logger.info(
        f"Sweep of {len(specs)} trials over d={sweep_config.distances}, {len(sweep_config.ps)} rates, {workers} workers"
    )
    runner = _spec_runner(sweep_config)
    if workers > 1:
        outcomes = specs.parallel_apply(runner, axis=1)
    else:
        outcomes = specs.apply(runner, axis=1)
    results = pd.concat([specs, outcomes], axis=1)
    summary = summarize(results)
    for _, row in summary[summary["censored_count"] > 0].iterrows():
        logger.warning(f"d={row['d']} p={row['p']:.3g}: {row['censored_count']} censored trials, mean is a lower bound")
    logger.success(f"Sweep finished: {len(summary)} cells")
    return summary


def sweep_csv(summary: pd.DataFrame) -> str:
    return summary.to_csv(index=False, float_format="%.10g", lineterminator="\n")


def sweep(sweep_config: SweepConfig) -> SweepSummary:
    summary = sweep_frame(sweep_config)
    cells = [
        SweepCell(
            d=int(r["d"]), p=float(r["p"]), trials=int(r["trials"]), mean=float(r["mean"]),
            stderr=float(r["stderr"]), censored_count=int(r["censored_count"]),
            lower_bound=bool(r["censored_count"] > 0),
        )
        for _, r in summary.iterrows()
    ]
    return SweepSummary(cells=cells, csv=sweep_csv(summary))


def cells_frame(cells: list[SweepCell]) -> pd.DataFrame:
    return pd.DataFrame([c.model_dump() for c in cells])[CSV_COLUMNS]


def baseline_sweep(ps: list[float], trials: int, seed: int, max_cycles: int) -> list[BaselineCell]:
    cells = []
    for i, p in enumerate(ps):
        lifetimes = np.array([
            run_baseline(NoiseParams.uniform(p), seed, max_cycles, rng=trial_rng(seed, 0, i, k)).cycles_to_failure
            for k in range(trials)
        ], dtype=float)
        stderr = float(lifetimes.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        cells.append(BaselineCell(p=p, trials=trials, mean=float(lifetimes.mean()), stderr=stderr))
    return cells


def _fits(summary: pd.DataFrame) -> dict[int, np.ndarray]:
    fits = {}
    for d, group in summary.groupby("d"):
        group = group[(group["mean"] > 0) & (group["p"] > 0)]
        if len(group) >= 2:
            fits[int(d)] = np.polyfit(np.log(group["p"].to_numpy()), np.log(group["mean"].to_numpy()), 1)
    return fits


def _crossings(fits: dict[int, np.ndarray], lo: float, hi: float) -> list[float]:
    """Pairwise intersections of the log-log fits inside [lo, hi] (log p)."""
    result = []
    ds = sorted(fits)
    for i, a in enumerate(ds):
        for b in ds[i + 1:]:
            (s1, c1), (s2, c2) = fits[a], fits[b]
            if np.isclose(s1, s2):
                continue
            x = (c2 - c1) / (s1 - s2)
            if lo <= x <= hi:
                result.append(float(np.exp(x)))
    return result


def estimate_threshold(summary: pd.DataFrame, bootstrap: int = 1000, seed: int = 0) -> ThresholdEstimate:
    """
    Median of the pairwise crossings of linear fits of log(mean lifetime) against log(p).

    The interval is the 2.5 / 97.5 percentile range of the same statistic recomputed on
    means resampled from their standard errors.

    Raises:
        ConfigError: fewer than two distances or four rates.
        NoCrossingError: the fitted curves do not cross inside the sampled range.
    """
    if summary["d"].nunique() < 2 or summary["p"].nunique() < 4:
        raise ConfigError("threshold estimate needs at least 2 distances and 4 error rates")
    log_p = np.log(summary["p"][summary["p"] > 0])
    lo, hi = float(log_p.min()), float(log_p.max())
    crossings = _crossings(_fits(summary), lo, hi)
    if not crossings:
        raise NoCrossingError(f"p in [{np.exp(lo):.3g}, {np.exp(hi):.3g}]")
    p_th = float(np.median(crossings))
    logger.info(f"Threshold crossing estimate {p_th:.4g} from {len(crossings)} pairs")

    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(bootstrap):
        resampled = summary.copy()
        noise = rng.standard_normal(len(resampled))
        resampled["mean"] = np.maximum(resampled["mean"] + resampled["stderr"] * noise, 1e-12)
        found = _crossings(_fits(resampled), lo, hi)
        if found:
            samples.append(np.median(found))
    if samples:
        ci_low, ci_high = (float(v) for v in np.percentile(samples, [2.5, 97.5]))
    else:
        ci_low = ci_high = p_th
    logger.success(f"Threshold {p_th:.4g} [{ci_low:.4g}, {ci_high:.4g}]")
    return ThresholdEstimate(p_th=p_th, ci_low=ci_low, ci_high=ci_high, crossings=sorted(crossings))


def plotdata(summary: pd.DataFrame, baseline: list[BaselineCell] | None = None) -> str:
    """Whitespace-separated columns: p, mean per distance, stderr per distance, baseline mean."""
    means = summary.pivot(index="p", columns="d", values="mean")
    errors = summary.pivot(index="p", columns="d", values="stderr")
    table = pd.concat(
        [means.add_prefix("mean_d"), errors.add_prefix("stderr_d")], axis=1
    )
    if baseline:
        base = pd.Series({c.p: c.mean for c in baseline}, name="baseline")
        table = table.join(base, how="outer")
    table = table.sort_index()
    table.index.name = "p"
    lines = ["# " + " ".join(["p", *map(str, table.columns)])]
    for p, row in table.iterrows():
        values = ["nan" if pd.isna(v) else f"{v:.10g}" for v in row]
        lines.append(" ".join([f"{p:.10g}", *values]))
    return "\n".join(lines) + "\n"
