import numpy as np
import pytest
from scipy import stats

from surface_app.exceptions import ConfigError
from surface_app.logic.helpers.noise_model import (
    NoiseParams,
    flip_layer,
    memory_layer,
    sample_memory,
    sample_two_qubit,
    trial_rng,
    two_qubit_layer,
)


def test_from_mapping_overrides_common_rate():
    noise = NoiseParams.from_mapping({"p": 0.01, "p_r": 0.002})
    assert noise == NoiseParams(p_i=0.01, p_r=0.002, p_m=0.01, p_g=0.01)
    assert NoiseParams.from_mapping({}).is_noiseless


@pytest.mark.parametrize("values", [{"q": 0.1}, {"p": "high"}, {"p": 1.5}, {"p_g": -0.1}])
def test_from_mapping_rejects(values):
    with pytest.raises(ConfigError):
        NoiseParams.from_mapping(values)


def test_to_dict():
    assert NoiseParams.uniform(0.1).to_dict() == {"p_i": 0.1, "p_r": 0.1, "p_m": 0.1, "p_g": 0.1}


def test_trial_streams_are_reproducible_and_distinct():
    a = trial_rng(7, 3, 0, 1).random(5)
    b = trial_rng(7, 3, 0, 1).random(5)
    c = trial_rng(7, 3, 0, 2).random(5)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_zero_rates_draw_nothing(rng):
    state = rng.bit_generator.state
    assert not flip_layer(0.0, 10, rng).any()
    x, z = memory_layer(0.0, 10, rng)
    assert not (x.any() or z.any())
    assert not any(v.any() for v in two_qubit_layer(0.0, 10, rng))
    assert rng.bit_generator.state == state


def test_memory_layer_distribution(rng):
    n, p_m = 200_000, 0.3
    x, z = memory_layer(p_m, n, rng)
    codes = x.astype(int) + 2 * z.astype(int)
    # I, X, Z, Y
    observed = np.bincount(codes, minlength=4)
    expected = n * np.array([1 - p_m, p_m / 3, p_m / 3, p_m / 3])
    assert stats.chisquare(observed, expected).pvalue > 1e-3


def test_two_qubit_layer_is_uniform_over_fifteen(rng):
    k = 150_000
    ax, az, bx, bz = two_qubit_layer(1.0, k, rng)
    codes = (ax.astype(int) + 2 * az) * 4 + (bx.astype(int) + 2 * bz)
    observed = np.bincount(codes, minlength=16)
    assert observed[0] == 0
    assert stats.chisquare(observed[1:]).pvalue > 1e-3


def test_flip_layer_rate(rng):
    flips = flip_layer(0.2, 100_000, rng)
    assert stats.binomtest(int(flips.sum()), flips.size, 0.2).pvalue > 1e-3


def test_scalar_samplers(rng):
    assert sample_memory(0.0, rng) == "I"
    assert sample_two_qubit(0.0, rng) == ("I", "I")
    pairs = {sample_two_qubit(1.0, rng) for _ in range(2000)}
    assert ("I", "I") not in pairs
    assert len(pairs) == 15
