"""Four-parameter circuit-level Pauli noise and per-trial random streams."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from typing import Any, Mapping

import numpy as np

from surface_app.exceptions import ConfigError

PAULIS = ("I", "X", "Y", "Z")
# x and z bits indexed by Pauli code 0..3 = I, X, Y, Z
_X_BIT = np.array([0, 1, 1, 0], dtype=np.uint8)
_Z_BIT = np.array([0, 0, 1, 1], dtype=np.uint8)

NOISE_KEYS = ("p_i", "p_r", "p_m", "p_g")


def trial_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent stream for one trial, addressed by (master seed, key...)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    )


@dataclass(frozen=True)
class NoiseParams:
    p_i: float = 0.0
    p_r: float = 0.0
    p_m: float = 0.0
    p_g: float = 0.0

    def __post_init__(self):
        for key in NOISE_KEYS:
            value = getattr(self, key)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{key}={value} is outside [0, 1]")

    @classmethod
    def uniform(cls, p: float) -> NoiseParams:
        return cls(p, p, p, p)

    @classmethod
    def noiseless(cls) -> NoiseParams:
        return cls()

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> NoiseParams:
        """
        Reads `p` (all four rates) and/or individual p_i, p_r, p_m, p_g overrides.

        Raises:
            ConfigError: on unknown keys or non-numeric values.
        """
        unknown = set(values) - {"p", *NOISE_KEYS}
        if unknown:
            raise ConfigError(f"unknown noise keys {sorted(unknown)}")
        try:
            base = float(values.get("p", 0.0))
            rates = {k: float(values.get(k, base)) for k in NOISE_KEYS}
        except (TypeError, ValueError) as e:
            raise ConfigError(f"noise rates must be numbers: {e}")
        return cls(**rates)

    @property
    def is_noiseless(self) -> bool:
        return not any(getattr(self, k) for k in NOISE_KEYS)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def sample_flip(p: float, rng: np.random.Generator) -> bool:
    return bool(rng.random() < p)


def sample_memory(p_m: float, rng: np.random.Generator) -> str:
    """I with probability 1 - p_m, otherwise X, Y or Z with p_m / 3 each."""
    if rng.random() >= p_m:
        return "I"
    return PAULIS[int(rng.integers(1, 4))]


def sample_two_qubit(p_g: float, rng: np.random.Generator) -> tuple[str, str]:
    """II with probability 1 - p_g, otherwise one of the 15 nontrivial pairs uniformly."""
    if rng.random() >= p_g:
        return "I", "I"
    code = int(rng.integers(1, 16))
    return PAULIS[code // 4], PAULIS[code % 4]


def flip_layer(p: float, n: int, rng: np.random.Generator) -> np.ndarray:
    if p <= 0.0 or n == 0:
        return np.zeros(n, dtype=np.uint8)
    return (rng.random(n) < p).astype(np.uint8)


def memory_layer(p_m: float, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """x and z error bits for n idle qubits."""
    if p_m <= 0.0 or n == 0:
        zeros = np.zeros(n, dtype=np.uint8)
        return zeros, zeros.copy()
    hit = rng.random(n) < p_m
    codes = np.where(hit, rng.integers(1, 4, size=n), 0)
    return _X_BIT[codes], _Z_BIT[codes]


def two_qubit_layer(
        p_g: float, k: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """x/z error bits on the first and second qubit of k gates."""
    if p_g <= 0.0 or k == 0:
        zeros = np.zeros(k, dtype=np.uint8)
        return zeros, zeros.copy(), zeros.copy(), zeros.copy()
    hit = rng.random(k) < p_g
    codes = np.where(hit, rng.integers(1, 16, size=k), 0)
    first, second = codes // 4, codes % 4
    return _X_BIT[first], _Z_BIT[first], _X_BIT[second], _Z_BIT[second]
