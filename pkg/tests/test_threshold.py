import numpy as np
import pandas as pd
import pytest

from surface_app.exceptions import ConfigError, NoCrossingError
from surface_app.logic.helpers import threshold
from surface_app.logic.helpers.noise_model import NoiseParams
from surface_app.logic.helpers.planar_lattice import build_lattice
from surface_app.schemas import BaselineCell, SweepConfig
from surface_app.schemas.enums import FailureType


def test_noiseless_trial_is_censored():
    result = threshold.run_trial(3, NoiseParams.noiseless(), seed=0, max_cycles=5)
    assert result.censored
    assert result.cycles_to_failure == 5
    assert result.failure_type is None


def test_injected_logical_fails_in_first_cycle():
    lattice = build_lattice(5)
    chain = {q: "X" for q in lattice.logical_x_support}
    result = threshold.run_trial(5, NoiseParams.noiseless(), seed=0, max_cycles=10, initial_errors=chain)
    assert not result.censored
    assert result.cycles_to_failure == 1
    assert result.failure_type == FailureType.LOGICAL_X


def test_correctable_initial_error_survives():
    lattice = build_lattice(5)
    result = threshold.run_trial(
        5, NoiseParams.noiseless(), seed=0, max_cycles=3, initial_errors={lattice.data_index((4, 4)): "Y"}
    )
    assert result.censored


def test_trial_rejects_zero_cycles():
    with pytest.raises(ConfigError):
        threshold.run_trial(3, NoiseParams.uniform(0.01), seed=0, max_cycles=0)


def test_trials_are_reproducible():
    a = threshold.run_trial(3, NoiseParams.uniform(0.03), seed=4, max_cycles=500)
    b = threshold.run_trial(3, NoiseParams.uniform(0.03), seed=4, max_cycles=500)
    assert a == b


def test_baseline():
    assert threshold.run_baseline(NoiseParams.noiseless(), seed=0, max_cycles=7).censored
    hot = threshold.run_baseline(NoiseParams.uniform(1.0), seed=0, max_cycles=1000)
    assert not hot.censored and hot.distance == 1


def test_baseline_sweep_lifetime_falls_with_rate():
    cells = threshold.baseline_sweep([0.001, 0.05], trials=200, seed=1, max_cycles=100_000)
    assert cells[0].mean > cells[1].mean
    # a cycle survives only if its six idle Paulis multiply to the identity
    assert cells[1].mean == pytest.approx(1 / (0.75 * (1 - (1 - 0.05 * 4 / 3) ** 6)), rel=0.25)


def test_summarize():
    results = pd.DataFrame({
        "d": [3, 3, 3, 5],
        "p": [0.01, 0.01, 0.01, 0.01],
        "cycles": [10, 20, 30, 7],
        "censored": [False, False, True, False],
    })
    summary = threshold.summarize(results)
    assert list(summary.columns) == threshold.CSV_COLUMNS
    row = summary.iloc[0]
    assert row["trials"] == 3
    assert row["mean"] == 20
    assert row["stderr"] == pytest.approx(10 / np.sqrt(3))
    assert row["censored_count"] == 1
    assert summary.iloc[1]["stderr"] == 0


def test_sweep_is_deterministic():
    sweep_config = SweepConfig(distances=[3], ps=[0.02, 0.04], trials=3, max_cycles=40, seed=9, workers=1)
    first, second = threshold.sweep(sweep_config), threshold.sweep(sweep_config)
    assert first.csv == second.csv
    assert first.csv.splitlines()[0] == ",".join(threshold.CSV_COLUMNS)
    assert [c.trials for c in first.cells] == [3, 3]
    assert all(c.lower_bound == (c.censored_count > 0) for c in first.cells)


def _planted(ps, crossing=5e-3, stderr_frac=0.01) -> pd.DataFrame:
    rows = []
    for d in (3, 5, 7):
        for p in ps:
            mean = 100.0 * (p / crossing) ** (-d)
            rows.append({"d": d, "p": p, "trials": 100, "mean": mean, "stderr": stderr_frac * mean,
                         "censored_count": 0})
    return pd.DataFrame(rows, columns=threshold.CSV_COLUMNS)


def test_estimate_recovers_planted_crossing():
    summary = _planted(SweepConfig.log_grid(3e-3, 1.2e-2, 8))
    estimate = threshold.estimate_threshold(summary, bootstrap=200, seed=1)
    assert estimate.p_th == pytest.approx(5e-3, rel=1e-6)
    assert len(estimate.crossings) == 3
    assert estimate.ci_low <= estimate.p_th <= estimate.ci_high


def test_estimate_without_crossing():
    with pytest.raises(NoCrossingError):
        threshold.estimate_threshold(_planted([1e-4, 2e-4, 3e-4, 5e-4]), bootstrap=10)


def test_estimate_needs_enough_cells():
    summary = _planted([1e-3, 2e-3, 4e-3, 8e-3])
    with pytest.raises(ConfigError):
        threshold.estimate_threshold(summary[summary["d"] == 3])
    with pytest.raises(ConfigError):
        threshold.estimate_threshold(summary[summary["p"] < 5e-3])


def test_plotdata():
    summary = _planted([2e-3, 4e-3])
    text = threshold.plotdata(summary, [BaselineCell(p=1e-3, trials=10, mean=50.0, stderr=1.0)])
    lines = text.splitlines()
    assert lines[0] == "# p mean_d3 mean_d5 mean_d7 stderr_d3 stderr_d5 stderr_d7 baseline"
    assert len(lines) == 4
    assert lines[1].split()[0] == "0.001"
    assert lines[1].split()[1] == "nan"
    assert lines[2].split()[-1] == "nan"


@pytest.mark.slow
def test_lifetime_grows_with_distance_below_threshold():
    sweep_config = SweepConfig(distances=[3, 5], ps=[2e-3], trials=40, max_cycles=20_000, seed=2, workers=1)
    cells = {c.d: c for c in threshold.sweep(sweep_config).cells}
    assert cells[5].mean > cells[3].mean
