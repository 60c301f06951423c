"""Linear algebra over GF(2) on 0/1 numpy matrices."""

from __future__ import annotations

import numpy as np

from .pauli import PauliString


def to_rows(strings: list[PauliString]) -> np.ndarray:
    """Symplectic rows [x_0..x_{n-1} | z_0..z_{n-1}] for each string."""
    if not strings:
        return np.zeros((0, 0), dtype=np.uint8)
    n = strings[0].n
    rows = np.zeros((len(strings), 2 * n), dtype=np.uint8)
    for i, p in enumerate(strings):
        for q in range(n):
            ch = p[q]
            rows[i, q] = ch in "XY"
            rows[i, n + q] = ch in "YZ"
    return rows


def from_row(row: np.ndarray) -> PauliString:
    n = row.shape[0] // 2
    label = "".join("IXZY"[int(row[q]) + 2 * int(row[n + q])] for q in range(n))
    return PauliString.from_label(label)


def rref(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with leftmost pivots; zero rows are dropped."""
    a = (m.copy() % 2).astype(np.uint8)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        k = r + hits[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        a[others] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m: np.ndarray, ncols: int) -> np.ndarray:
    """Basis (as rows) of {v : m v = 0 mod 2}, in reduced echelon form."""
    if m.size == 0:
        return np.eye(ncols, dtype=np.uint8)
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = red[r, f]
    if basis.shape[0] == 0:
        return basis
    return rref(basis)[0]


def swap_halves(m: np.ndarray) -> np.ndarray:
    n = m.shape[1] // 2
    return np.concatenate([m[:, n:], m[:, :n]], axis=1)


def solve(basis: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Coefficients c with c @ basis = target (mod 2), or None if unreachable.

    ``basis`` rows must be independent.
    """
    k = basis.shape[0]
    if k == 0:
        return np.zeros(0, dtype=np.uint8) if not target.any() else None
    aug = np.concatenate([basis.T, target[:, None]], axis=1) % 2
    red, pivots = rref(aug)
    if k in pivots:
        return None
    coeffs = np.zeros(k, dtype=np.uint8)
    for r, p in enumerate(pivots):
        coeffs[p] = red[r, k]
    return coeffs
