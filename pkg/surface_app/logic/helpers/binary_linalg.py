"""Linear algebra over GF(2) on numpy uint8 arrays."""

import numpy as np


def _as_bits(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def gf2_row_reduce(matrix) -> tuple[np.ndarray, list[int]]:
    """
    Brings a binary matrix to reduced row echelon form.

    Returns:
        The reduced matrix (zero rows at the bottom) and the list of pivot columns.
    """
    m = _as_bits(matrix).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        mask = m[:, c].astype(bool)
        mask[r] = False
        m[mask] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def gf2_rank(matrix) -> int:
    m = _as_bits(matrix)
    if m.size == 0:
        return 0
    return len(gf2_row_reduce(m)[1])


def gf2_solve(a, b) -> np.ndarray | None:
    """
    Finds one solution x of a @ x = b (mod 2), free variables set to zero.

    Returns:
        The solution vector, or None when the system is inconsistent.
    """
    a = _as_bits(a)
    b = _as_bits(b).reshape(-1)
    rows, cols = a.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.uint8)
    reduced, pivots = gf2_row_reduce(np.concatenate([a, b[:, None]], axis=1))
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.uint8)
    for i, c in enumerate(pivots):
        x[c] = reduced[i, -1]
    return x
