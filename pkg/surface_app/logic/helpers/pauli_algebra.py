"""
Signed Pauli operators and stabilizer tableaus in binary symplectic form.

Qubit k of an operator carries I for bits (x, z) = (0, 0), X for (1, 0), Z for (0, 1) and
the Hermitian Y for (1, 1). Signs are restricted to +1 and -1.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from surface_app.exceptions import PauliAlgebraError
from .binary_linalg import gf2_rank, gf2_solve
from .gates import Gate

_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1), "_": (0, 0)}
_BITS_LABEL = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}


def _phase_exponent(x1, z1, x2, z2) -> np.ndarray:
    """Power of i picked up by each single-qubit factor of a product P1 * P2."""
    x1, z1, x2, z2 = (np.asarray(v, dtype=np.int64) for v in (x1, z1, x2, z2))
    g = (
        x1 * z1 * (z2 - x2)
        + x1 * (1 - z1) * z2 * (2 * x2 - 1)
        + (1 - x1) * z1 * x2 * (1 - 2 * z2)
    )
    return g.sum(axis=-1)


def _product_sign(s1, s2, phase) -> np.ndarray:
    total = (np.where(np.asarray(s1) < 0, 2, 0) + np.where(np.asarray(s2) < 0, 2, 0) + phase) % 4
    if np.any(total % 2):
        raise PauliAlgebraError("product of anticommuting operators carries an imaginary phase")
    return np.where(total == 0, 1, -1).astype(np.int8)


class PauliOperator:
    """A signed n-qubit Pauli operator."""

    __slots__ = ("x", "z", "sign")

    def __init__(self, x: Iterable[int], z: Iterable[int], sign: int = 1):
        self.x = np.asarray(x, dtype=np.uint8) & 1
        self.z = np.asarray(z, dtype=np.uint8) & 1
        if self.x.ndim != 1 or self.x.shape != self.z.shape:
            raise PauliAlgebraError(f"bit vectors of shapes {self.x.shape} and {self.z.shape}")
        if sign not in (1, -1):
            raise PauliAlgebraError(f"sign {sign} is not +1 or -1")
        self.sign = int(sign)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @classmethod
    def identity(cls, n: int) -> PauliOperator:
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_label(cls, label: str) -> PauliOperator:
        """Parses "+XZIY" / "-ZZ" (a leading sign is optional, U+2212 is accepted)."""
        text = label.strip().replace("−", "-")
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:].strip()
        try:
            bits = [_LABEL_BITS[ch] for ch in text.upper()]
        except KeyError as e:
            raise PauliAlgebraError(f"unknown Pauli symbol in {label!r}") from e
        x, z = zip(*bits) if bits else ((), ())
        return cls(x, z, sign)

    @classmethod
    def from_support(cls, n: int, kind: str, qubits: Iterable[int], sign: int = 1) -> PauliOperator:
        """Builds a tensor product of one Pauli kind ('X', 'Y' or 'Z') on the given qubits."""
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        bx, bz = _LABEL_BITS[kind]
        for q in qubits:
            if not 0 <= q < n:
                raise PauliAlgebraError(f"qubit {q} out of range for {n} qubits")
            x[q] ^= bx
            z[q] ^= bz
        return cls(x, z, sign)

    @classmethod
    def from_mapping(cls, n: int, paulis: dict[int, str], sign: int = 1) -> PauliOperator:
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        for q, kind in paulis.items():
            x[q], z[q] = _LABEL_BITS[kind]
        return cls(x, z, sign)

    def to_label(self) -> str:
        body = "".join(_BITS_LABEL[(int(a), int(b))] for a, b in zip(self.x, self.z))
        return ("+" if self.sign > 0 else "-") + body

    def pauli_at(self, qubit: int) -> str:
        return _BITS_LABEL[(int(self.x[qubit]), int(self.z[qubit]))]

    @property
    def support(self) -> list[int]:
        return np.flatnonzero(self.x | self.z).tolist()

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def commutes(self, other: PauliOperator) -> bool:
        return commutes(self, other)

    def unsigned(self) -> PauliOperator:
        return PauliOperator(self.x, self.z, 1)

    def with_sign(self, sign: int) -> PauliOperator:
        return PauliOperator(self.x, self.z, sign)

    def copy(self) -> PauliOperator:
        return PauliOperator(self.x.copy(), self.z.copy(), self.sign)

    def extended(self, n: int) -> PauliOperator:
        """Pads the operator with identities up to n qubits."""
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[: self.n] = self.x
        z[: self.n] = self.z
        return PauliOperator(x, z, self.sign)

    def symplectic(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    def key(self) -> bytes:
        """Sign-free identity of the operator, usable as a dict key."""
        return np.packbits(self.symplectic()).tobytes() + self.n.to_bytes(4, "little")

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __neg__(self) -> PauliOperator:
        return PauliOperator(self.x, self.z, -self.sign)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.sign == other.sign
            and self.n == other.n
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.sign, self.key()))

    def __repr__(self) -> str:
        return f"PauliOperator({self.to_label()!r})"


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    """Parity of the symplectic inner product."""
    if a.n != b.n:
        raise PauliAlgebraError(f"size mismatch: {a.n} and {b.n} qubits")
    return int((np.dot(a.x, b.z) + np.dot(a.z, b.x)) % 2) == 0


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """
    Signed product a * b.

    Raises:
        PauliAlgebraError: on size mismatch or when the product carries a phase of +-i,
            which only happens for anticommuting factors.
    """
    if a.n != b.n:
        raise PauliAlgebraError(f"size mismatch: {a.n} and {b.n} qubits")
    phase = _phase_exponent(a.x, a.z, b.x, b.z)
    sign = int(_product_sign(a.sign, b.sign, phase))
    return PauliOperator(a.x ^ b.x, a.z ^ b.z, sign)


def product(ops: Sequence[PauliOperator], n: int | None = None) -> PauliOperator:
    if not ops:
        if n is None:
            raise PauliAlgebraError("empty product needs an explicit qubit count")
        return PauliOperator.identity(n)
    acc = ops[0]
    for op in ops[1:]:
        acc = multiply(acc, op)
    return acc


def _conjugate_bits(x: np.ndarray, z: np.ndarray, sign: np.ndarray, gate: Gate) -> None:
    """In-place conjugation of a stack of operators (rows) by one Clifford gate."""
    name = gate.name
    flip = None
    if name in ("CNOT", "CZ"):
        a, b = gate.qubits
        xa, za, xb, zb = x[..., a].copy(), z[..., a].copy(), x[..., b].copy(), z[..., b].copy()
        if name == "CNOT":
            flip = xa & zb & (xb ^ za ^ 1)
            x[..., b] = xb ^ xa
            z[..., a] = za ^ zb
        else:
            flip = xa & xb & (za ^ zb)
            z[..., a] = za ^ xb
            z[..., b] = zb ^ xa
    else:
        (q,) = gate.qubits
        xq, zq = x[..., q].copy(), z[..., q].copy()
        if name == "I":
            return
        if name == "X":
            flip = zq
        elif name == "Z":
            flip = xq
        elif name == "Y":
            flip = xq ^ zq
        elif name == "H":
            flip = xq & zq
            x[..., q], z[..., q] = zq, xq
        elif name == "S":
            flip = xq & zq
            z[..., q] = zq ^ xq
        elif name == "S_DAG":
            flip = xq & (zq ^ 1)
            z[..., q] = zq ^ xq
        else:
            raise PauliAlgebraError(f"{name} is not a Clifford gate")
    sign[...] = np.where(flip.astype(bool), -sign, sign)


def conjugate(m: PauliOperator, u: Gate) -> PauliOperator:
    """Returns U m U^dagger for a Clifford gate U."""
    for q in u.qubits:
        if not 0 <= q < m.n:
            raise PauliAlgebraError(f"gate {u.name} index {q} out of range for {m.n} qubits")
    x, z = m.x.copy(), m.z.copy()
    sign = np.array(m.sign, dtype=np.int8)
    _conjugate_bits(x, z, sign, u)
    return PauliOperator(x, z, int(sign))


class SignedBasis:
    """
    Reduced row-echelon basis of the group generated by commuting signed Paulis.

    The basis (bits and signs) is unique for a given group, so two groups are equal
    exactly when their bases are.
    """

    def __init__(self, ops: Sequence[PauliOperator], n: int | None = None):
        if n is None:
            if not ops:
                raise PauliAlgebraError("empty generator list needs an explicit qubit count")
            n = ops[0].n
        self.n = n
        if ops:
            xs = np.array([op.x for op in ops], dtype=np.uint8)
            zs = np.array([op.z for op in ops], dtype=np.uint8)
            signs = np.array([op.sign for op in ops], dtype=np.int8)
        else:
            xs = np.zeros((0, n), np.uint8)
            zs = np.zeros((0, n), np.uint8)
            signs = np.zeros(0, np.int8)
        self.xs, self.zs, self.signs, self.pivots = self._reduce(xs, zs, signs)

    @staticmethod
    def _reduce(xs, zs, signs):
        xs, zs, signs = xs.copy(), zs.copy(), signs.copy()
        rows, n = xs.shape
        pivots: list[int] = []
        r = 0
        for c in range(2 * n):
            if r == rows:
                break
            column = xs[:, c] if c < n else zs[:, c - n]
            nz = np.flatnonzero(column[r:])
            if nz.size == 0:
                continue
            p = r + nz[0]
            if p != r:
                xs[[r, p]] = xs[[p, r]]
                zs[[r, p]] = zs[[p, r]]
                signs[[r, p]] = signs[[p, r]]
                column = xs[:, c] if c < n else zs[:, c - n]
            targets = np.flatnonzero(column)
            targets = targets[targets != r]
            if targets.size:
                phase = _phase_exponent(xs[targets], zs[targets], xs[r], zs[r])
                signs[targets] = _product_sign(signs[targets], signs[r], phase)
                xs[targets] ^= xs[r]
                zs[targets] ^= zs[r]
            pivots.append(c)
            r += 1
        return xs[:r], zs[:r], signs[:r], pivots

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def operators(self) -> list[PauliOperator]:
        return [PauliOperator(x, z, int(s)) for x, z, s in zip(self.xs, self.zs, self.signs)]

    def reduce(self, op: PauliOperator) -> PauliOperator:
        """Canonical representative of op modulo the group, sign tracked."""
        if op.n != self.n:
            raise PauliAlgebraError(f"size mismatch: {op.n} and {self.n} qubits")
        x, z, sign = op.x.copy(), op.z.copy(), op.sign
        for i, c in enumerate(self.pivots):
            bit = x[c] if c < self.n else z[c - self.n]
            if bit:
                phase = _phase_exponent(x, z, self.xs[i], self.zs[i])
                sign = int(_product_sign(sign, self.signs[i], phase))
                x ^= self.xs[i]
                z ^= self.zs[i]
        return PauliOperator(x, z, sign)

    def value_of(self, op: PauliOperator) -> int:
        """+1 / -1 when op (with its sign) belongs to +-group, 0 otherwise."""
        rest = self.reduce(op)
        return rest.sign if rest.is_identity() else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignedBasis):
            return NotImplemented
        return (
            self.n == other.n
            and self.pivots == other.pivots
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.zs, other.zs)
            and np.array_equal(self.signs, other.signs)
        )


def canonical_group(ops: Sequence[PauliOperator], n: int | None = None) -> SignedBasis:
    return SignedBasis(ops, n)


def symplectic_rank(ops: Sequence[PauliOperator]) -> int:
    if not ops:
        return 0
    return gf2_rank(np.array([op.symplectic() for op in ops]))


class StabilizerTableau:
    """
    n signed generators on n qubits describing a stabilizer state.

    Generators are stored row-wise in x / z bit matrices with a sign vector; all
    operations mutate the tableau in place.
    """

    def __init__(self, generators: Sequence[PauliOperator], require_independent: bool = True):
        if not generators:
            raise PauliAlgebraError("a tableau needs at least one generator")
        n = generators[0].n
        if any(g.n != n for g in generators):
            raise PauliAlgebraError("generators act on different qubit counts")
        if len(generators) != n:
            raise PauliAlgebraError(f"{len(generators)} generators for {n} qubits")
        self.n = n
        self.xs = np.array([g.x for g in generators], dtype=np.uint8)
        self.zs = np.array([g.z for g in generators], dtype=np.uint8)
        self.signs = np.array([g.sign for g in generators], dtype=np.int8)
        self._basis: SignedBasis | None = None
        if not self.commuting():
            raise PauliAlgebraError("generators do not pairwise commute")
        if require_independent and not self.independent():
            raise PauliAlgebraError("generators are not independent")

    @classmethod
    def from_labels(cls, labels: Iterable[str], require_independent: bool = True) -> StabilizerTableau:
        return cls([PauliOperator.from_label(lbl) for lbl in labels], require_independent)

    @classmethod
    def from_text(cls, text: str, require_independent: bool = True) -> StabilizerTableau:
        """One generator per line, e.g. "+ZZII"; blank lines and '#' comments are skipped."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        return cls.from_labels([ln for ln in lines if ln], require_independent)

    @classmethod
    def zero_state(cls, n: int) -> StabilizerTableau:
        return cls([PauliOperator.from_support(n, "Z", [q]) for q in range(n)])

    def to_text(self) -> str:
        return "\n".join(g.to_label() for g in self.generators) + "\n"

    @property
    def generators(self) -> list[PauliOperator]:
        return [PauliOperator(x, z, int(s)) for x, z, s in zip(self.xs, self.zs, self.signs)]

    def generator(self, i: int) -> PauliOperator:
        return PauliOperator(self.xs[i], self.zs[i], int(self.signs[i]))

    def copy(self) -> StabilizerTableau:
        clone = object.__new__(StabilizerTableau)
        clone.n = self.n
        clone.xs = self.xs.copy()
        clone.zs = self.zs.copy()
        clone.signs = self.signs.copy()
        clone._basis = self._basis
        return clone

    def _touch(self) -> None:
        self._basis = None

    def basis(self) -> SignedBasis:
        if self._basis is None:
            self._basis = SignedBasis(self.generators, self.n)
        return self._basis

    def anticommuting(self, op: PauliOperator) -> np.ndarray:
        """Indices of generators that anticommute with op."""
        parity = (self.xs.astype(np.int64) @ op.z + self.zs.astype(np.int64) @ op.x) % 2
        return np.flatnonzero(parity)

    def commuting(self) -> bool:
        sym = (self.xs.astype(np.int64) @ self.zs.T.astype(np.int64)) % 2
        return bool(np.array_equal(sym, sym.T))

    def independent(self) -> bool:
        return gf2_rank(np.concatenate([self.xs, self.zs], axis=1)) == self.n

    def is_valid(self) -> bool:
        return self.commuting() and self.independent()

    def expectation(self, op: PauliOperator) -> int:
        """Deterministic value of op on the state: +1, -1, or 0 when the outcome is random."""
        self._check_size(op)
        if self.anticommuting(op).size:
            return 0
        return self.basis().value_of(op)

    def _check_size(self, op: PauliOperator) -> None:
        if op.n != self.n:
            raise PauliAlgebraError(f"operator on {op.n} qubits measured on a {self.n}-qubit tableau")

    def _random_outcome(self, rng: np.random.Generator | None, forced_outcome: int | None) -> int:
        if forced_outcome is not None:
            if forced_outcome not in (1, -1):
                raise PauliAlgebraError(f"forced outcome {forced_outcome} is not +1 or -1")
            return forced_outcome
        if rng is None:
            raise PauliAlgebraError("random measurement outcome requires a random source")
        return 1 if rng.integers(2) == 0 else -1

    def _dependent_index(self) -> int:
        full = np.concatenate([self.xs, self.zs], axis=1)
        rank = gf2_rank(full)
        for i in range(self.n):
            if gf2_rank(np.delete(full, i, axis=0)) == rank:
                return i
        raise PauliAlgebraError("tableau has no dependent generator")

    def measure(
            self,
            op: PauliOperator,
            rng: np.random.Generator | None = None,
            forced_outcome: int | None = None,
    ) -> tuple[int, bool]:
        """
        Measures op and updates the generators.

        Parameters:
            op: operator to measure.
            rng: random source for random outcomes.
            forced_outcome: post-selects a random outcome.

        Returns:
            (outcome, deterministic)
        """
        self._check_size(op)
        anti = self.anticommuting(op)
        if anti.size == 0:
            outcome = self.basis().value_of(op)
            if outcome != 0:
                if forced_outcome is not None:
                    raise PauliAlgebraError(f"outcome of {op.to_label()} is deterministic")
                return outcome, True
            outcome = self._random_outcome(rng, forced_outcome)
            i = self._dependent_index()
            self.xs[i], self.zs[i], self.signs[i] = op.x, op.z, op.sign * outcome
            self._touch()
            return outcome, False

        outcome = self._random_outcome(rng, forced_outcome)
        first, rest = anti[0], anti[1:]
        if rest.size:
            phase = _phase_exponent(self.xs[rest], self.zs[rest], self.xs[first], self.zs[first])
            self.signs[rest] = _product_sign(self.signs[rest], self.signs[first], phase)
            self.xs[rest] ^= self.xs[first]
            self.zs[rest] ^= self.zs[first]
        self.xs[first], self.zs[first], self.signs[first] = op.x, op.z, op.sign * outcome
        self._touch()
        return outcome, False

    def apply_gate(self, gate: Gate) -> StabilizerTableau:
        for q in gate.qubits:
            if not 0 <= q < self.n:
                raise PauliAlgebraError(f"gate {gate.name} index {q} out of range for {self.n} qubits")
        _conjugate_bits(self.xs, self.zs, self.signs, gate)
        self._touch()
        return self

    def apply_pauli(self, p: PauliOperator) -> StabilizerTableau:
        """Conjugates the state by a Pauli: generators anticommuting with p change sign."""
        self._check_size(p)
        anti = self.anticommuting(p)
        self.signs[anti] *= -1
        if anti.size:
            self._touch()
        return self

    def permute(self, mapping: dict[int, int]) -> StabilizerTableau:
        """Relabels qubit q as mapping[q]; mapping must be a bijection on the qubits it names."""
        if sorted(mapping) != sorted(mapping.values()):
            raise PauliAlgebraError("qubit relabelling is not a permutation")
        order = np.arange(self.n)
        for src, dst in mapping.items():
            order[dst] = src
        self.xs = self.xs[:, order]
        self.zs = self.zs[:, order]
        self._touch()
        return self

    def same_state(self, other: StabilizerTableau) -> bool:
        return self.basis() == other.basis()
