"""Noncontextual/contextual Hamiltonian split and the classical noncontextual solve.

A set of Pauli strings is noncontextual when, after removing the elements
that commute with everything else (the universal set), commutation is an
equivalence relation on what remains.  The equivalence classes then
pairwise anticommute, and every term's expectation is fixed by a +-1 value
for each generator of the commuting part and a unit vector ``r`` over the
class representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gf2
from .errors import DimensionError, EnumerationLimitError, PreconditionError
from .pauli import Phase, PauliString, PauliSum, multiply

DISCRETE_LIMIT = 16


def commutation_matrix(strings: Sequence[PauliString]) -> np.ndarray:
    """Boolean matrix C[i, j] = strings i and j commute."""
    if not strings:
        return np.ones((0, 0), dtype=bool)
    n = strings[0].n
    if any(p.n != n for p in strings):
        raise DimensionError("all strings must share a qubit count")
    rows = gf2.to_rows(list(strings)).astype(np.int64)
    x, z = rows[:, :n], rows[:, n:]
    return ((x @ z.T + z @ x.T) % 2) == 0


def _partition(comm: np.ndarray) -> tuple[list[int], list[list[int]]] | None:
    """Universal indices and anticommuting classes, or None if contextual."""
    m = comm.shape[0]
    if m == 0:
        return [], []
    universal_mask = comm.all(axis=1)
    universal = [int(i) for i in np.nonzero(universal_mask)[0]]
    rest = np.nonzero(~universal_mask)[0]
    if rest.size == 0:
        return universal, []
    r = comm[np.ix_(rest, rest)].astype(np.int64)
    # transitive iff r @ r has no support outside r
    if ((r @ r > 0) & (r == 0)).any():
        return None
    classes: list[list[int]] = []
    seen = np.zeros(rest.size, dtype=bool)
    for i in range(rest.size):
        if seen[i]:
            continue
        members = np.nonzero(r[i])[0]
        seen[members] = True
        classes.append([int(rest[j]) for j in members])
    return universal, classes


def is_noncontextual(terms: Iterable[PauliString]) -> bool:
    strings = list(dict.fromkeys(terms))
    return _partition(commutation_matrix(strings)) is not None


@dataclass(frozen=True)
class ContextualSplit:
    h_nc: PauliSum
    h_c: PauliSum


def split(h: PauliSum, strategy: str = "greedy") -> ContextualSplit:
    """Partition ``h`` into a noncontextual part and the contextual remainder.

    ``greedy`` visits terms by descending |coefficient| (ties by label) and
    keeps each one whose addition leaves the kept set noncontextual.
    ``diagonal`` keeps exactly the Z-type terms.
    """
    if len(h) == 0:
        raise PreconditionError("Hamiltonian has no terms")
    items = sorted(h.items(), key=lambda t: (-abs(t[1]), t[0].label))
    if strategy == "diagonal":
        keep = [p.x == 0 for p, _ in items]
    elif strategy == "greedy":
        comm = commutation_matrix([p for p, _ in items])
        kept: list[int] = []
        keep = [False] * len(items)
        for i in range(len(items)):
            trial = kept + [i]
            if _partition(comm[np.ix_(trial, trial)]) is not None:
                kept.append(i)
                keep[i] = True
    else:
        raise ValueError(f"unknown split strategy {strategy!r}")
    h_nc = PauliSum([t for t, k in zip(items, keep) if k], n=h.n)
    h_c = PauliSum([t for t, k in zip(items, keep) if not k], n=h.n)
    return ContextualSplit(h_nc, h_c)


@dataclass(frozen=True)
class Reconstruction:
    """term = sign * prod(generators[j] for j in subset) * representative[class_index]."""

    subset: tuple[int, ...]
    class_index: int | None
    sign: int


@dataclass(frozen=True)
class NoncontextualStructure:
    universal: list[PauliString]
    classes: list[list[PauliString]]
    generators: list[PauliString]
    representatives: list[PauliString]
    reconstruction: dict[PauliString, Reconstruction] = field(repr=False)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def rebuild(self, p: PauliString) -> tuple[Phase, PauliString]:
        """Multiply the reconstruction of ``p`` back out (phase included)."""
        rec = self.reconstruction[p]
        phase, acc = Phase(0 if rec.sign == 1 else 2), PauliString.identity(p.n)
        for j in rec.subset:
            ph, acc = multiply(acc, self.generators[j])
            phase = phase * ph
        if rec.class_index is not None:
            ph, acc = multiply(acc, self.representatives[rec.class_index])
            phase = phase * ph
        return phase, acc


def _product(strings: list[PauliString], n: int) -> tuple[Phase, PauliString]:
    phase, acc = Phase(0), PauliString.identity(n)
    for s in strings:
        ph, acc = multiply(acc, s)
        phase = phase * ph
    return phase, acc


def decompose(terms: Iterable[PauliString]) -> NoncontextualStructure:
    """Universal set, anticommuting classes, generators and reconstructions."""
    strings = sorted(dict.fromkeys(terms), key=lambda p: p.label)
    if not strings:
        return NoncontextualStructure([], [], [], [], {})
    n = strings[0].n
    non_id = [p for p in strings if not p.is_identity]
    part = _partition(commutation_matrix(non_id))
    if part is None:
        raise PreconditionError("term set is contextual")
    universal_idx, class_idx = part
    universal = [non_id[i] for i in universal_idx]
    classes = sorted(([non_id[i] for i in c] for c in class_idx), key=lambda c: c[0].label)
    reps = [c[0] for c in classes]

    candidates = list(universal)
    for c, a in zip(classes, reps):
        candidates += [multiply(b, a)[1] for b in c[1:]]
    generators: list[PauliString] = []
    r = 0
    for cand in candidates:
        if cand.is_identity:
            continue
        if gf2.rank(gf2.to_rows(generators + [cand])) > r:
            generators.append(cand)
            r += 1
    g_rows = gf2.to_rows(generators) if generators else np.zeros((0, 2 * n), dtype=np.uint8)

    def express(p: PauliString) -> tuple[tuple[int, ...], int]:
        if p.is_identity:
            return (), 1
        coeffs = gf2.solve(g_rows, gf2.to_rows([p])[0])
        if coeffs is None:
            raise AssertionError(f"{p} is not generated by the universal generators")
        subset = tuple(int(j) for j in np.nonzero(coeffs)[0])
        phase, prod = _product([generators[j] for j in subset], n)
        assert prod == p
        return subset, phase.sign

    recon: dict[PauliString, Reconstruction] = {}
    for p in strings:
        if p.is_identity:
            recon[p] = Reconstruction((), None, 1)
        elif p in universal:
            subset, sign = express(p)
            recon[p] = Reconstruction(subset, None, sign)
    for i, (c, a) in enumerate(zip(classes, reps)):
        for b in c:
            ph1, m = multiply(b, a)
            subset, sign_g = express(m)
            recon[b] = Reconstruction(subset, i, ph1.sign * sign_g)
    return NoncontextualStructure(universal, classes, generators, reps, recon)


@dataclass(frozen=True)
class ValueAssignment:
    q: tuple[int, ...]
    r: tuple[float, ...]

    def __post_init__(self):
        if any(v not in (1, -1) for v in self.q):
            raise ValueError("q entries must be +1 or -1")
        if self.r and abs(np.linalg.norm(self.r) - 1.0) > 1e-10:
            raise ValueError("r must be a unit vector")


@dataclass(frozen=True)
class NoncontextualSolution:
    assignment: ValueAssignment
    energy: float


def _term_tables(structure: NoncontextualStructure, h_nc: PauliSum):
    coeffs, masks, classes = [], [], []
    for p, c in h_nc.items():
        if p not in structure.reconstruction:
            raise DimensionError(f"term {p} is not part of the structure")
        rec = structure.reconstruction[p]
        coeffs.append(c * rec.sign)
        masks.append(sum(1 << j for j in rec.subset))
        classes.append(-1 if rec.class_index is None else rec.class_index)
    return np.array(coeffs), np.array(masks, dtype=np.int64), np.array(classes, dtype=np.int64)


def objective(structure: NoncontextualStructure, h_nc: PauliSum, a: ValueAssignment) -> float:
    """Energy of ``h_nc`` under the value assignment ``a``."""
    if len(a.q) != len(structure.generators) or len(a.r) != structure.n_classes:
        raise DimensionError("assignment does not match the structure")
    total = 0.0
    for p, c in h_nc.items():
        rec = structure.reconstruction[p]
        v = c * rec.sign
        for j in rec.subset:
            v *= a.q[j]
        if rec.class_index is not None:
            v *= a.r[rec.class_index]
        total += v
    return float(total)


def _energies_for_bits(bits: np.ndarray, coeffs, masks, classes, n_classes):
    """Optimal energy (and class vector b) for each q encoded as bitmask (bit j set: q_j = -1)."""
    signs = 1 - 2 * (np.bitwise_count(bits[:, None] & masks[None, :]) & 1).astype(np.int64)
    weighted = signs * coeffs[None, :]
    const = weighted[:, classes < 0].sum(axis=1)
    b = np.zeros((bits.size, n_classes))
    for i in range(n_classes):
        b[:, i] = weighted[:, classes == i].sum(axis=1)
    return const - np.linalg.norm(b, axis=1), b


def _unit_against(b: np.ndarray) -> tuple[float, ...]:
    nb = np.linalg.norm(b)
    if b.size == 0:
        return ()
    if nb == 0.0:
        r = np.zeros_like(b)
        r[0] = 1.0
        return tuple(r)
    return tuple(-b / nb)


def optimize_noncontextual(structure: NoncontextualStructure, h_nc: PauliSum, limit: int = DISCRETE_LIMIT,
                           allow_annealing: bool = False, seed: int = 0) -> NoncontextualSolution:
    """Minimize the noncontextual energy over (q, r).

    For fixed q the energy is affine in r, so the optimal unit r points
    against the class coefficient vector; q is enumerated exhaustively.
    """
    coeffs, masks, classes = _term_tables(structure, h_nc)
    k = len(structure.generators)
    if k > limit and not allow_annealing:
        raise EnumerationLimitError(
            f"{k} generators exceed the exhaustive limit {limit}; enable the annealing fallback")
    if k > limit:
        bits = _anneal(coeffs, masks, classes, structure.n_classes, k, seed)
    else:
        all_bits = np.arange(1 << k, dtype=np.int64)
        best_e, best_bits = np.inf, 0
        for start in range(0, all_bits.size, 1 << 14):
            chunk = all_bits[start:start + (1 << 14)]
            e, _ = _energies_for_bits(chunk, coeffs, masks, classes, structure.n_classes)
            i = int(np.argmin(e))
            if e[i] < best_e:
                best_e, best_bits = float(e[i]), int(chunk[i])
        bits = best_bits
    _, b = _energies_for_bits(np.array([bits], dtype=np.int64), coeffs, masks, classes, structure.n_classes)
    q = tuple(-1 if (bits >> j) & 1 else 1 for j in range(k))
    a = ValueAssignment(q, _unit_against(b[0]))
    return NoncontextualSolution(a, objective(structure, h_nc, a))


def _anneal(coeffs, masks, classes, n_classes, k, seed, sweeps=2000) -> int:
    rng = np.random.default_rng(seed)
    state = int(rng.integers(0, 1 << k))

    def energy(s):
        return float(_energies_for_bits(np.array([s], dtype=np.int64), coeffs, masks, classes, n_classes)[0][0])

    e = energy(state)
    best, best_e = state, e
    for t in range(sweeps):
        temp = max(1e-3, 1.0 - t / sweeps)
        cand = state ^ (1 << int(rng.integers(k)))
        ec = energy(cand)
        if ec < e or rng.random() < np.exp(-(ec - e) / temp):
            state, e = cand, ec
            if e < best_e:
                best, best_e = state, e
    return best
