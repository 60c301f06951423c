"""Z2-symmetry qubit tapering."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from . import gf2
from .errors import DimensionError, EnumerationLimitError, PreconditionError
from .pauli import ORACLE_LIMIT, PauliString, PauliSum, commutes, exact_ground
from .stabilizers import conjugate_sum, fix_qubits, map_to_single_qubits

SECTOR_ENUMERATION_LIMIT = 8


@dataclass(frozen=True)
class SymmetryBasis:
    generators: list[PauliString]
    single_qubit_targets: list[int] = field(default_factory=list)
    clifford_rotations: list[PauliString] = field(default_factory=list)
    target_paulis: list[str] = field(default_factory=list)
    signs: list[int] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def built(self) -> bool:
        return len(self.single_qubit_targets) == len(self.generators)


def _isotropic_subspace(vectors: list[PauliString]) -> list[PauliString]:
    """Largest pairwise-commuting subgroup of the group generated by ``vectors``.

    Symplectic Gram-Schmidt: anticommuting pairs are split off and one member
    of each pair is discarded.
    """
    pool = list(vectors)
    kept: list[PauliString] = []
    while pool:
        v = pool.pop(0)
        partner = next((i for i, w in enumerate(pool) if not commutes(v, w)), None)
        if partner is None:
            kept.append(v)
            continue
        w = pool.pop(partner)
        fixed = []
        for u in pool:
            if not commutes(u, w):
                u = (u * v)[1]
            if not commutes(u, v):
                u = (u * w)[1]
            fixed.append(u)
        pool = fixed
        kept.append(v)
    return kept


def find_z2_symmetries(h: PauliSum) -> SymmetryBasis:
    """Independent commuting Pauli strings that commute with every term of ``h``."""
    if len(h) == 0:
        raise PreconditionError("Hamiltonian has no terms")
    terms = [p for p in h if not p.is_identity]
    if h.n == 0:
        return SymmetryBasis([])
    rows = gf2.to_rows(terms) if terms else np.zeros((0, 2 * h.n), dtype=np.uint8)
    null = gf2.nullspace(gf2.swap_halves(rows) if terms else rows, 2 * h.n)
    gens = [gf2.from_row(r) for r in null]
    if any(not commutes(a, b) for a, b in itertools.combinations(gens, 2)):
        gens = _isotropic_subspace(gens)
        gens = [gf2.from_row(r) for r in gf2.rref(gf2.to_rows(gens))[0]]
    return SymmetryBasis(gens)


def build_rotations(basis: SymmetryBasis, h: PauliSum | None = None) -> SymmetryBasis:
    """Fill in the Clifford rotations sending each generator to a single-qubit X or Z."""
    m = map_to_single_qubits(list(basis.generators), allowed="XZ")
    if h is not None:
        for g in m.generators:
            for p in h:
                if not commutes(g, p):
                    raise PreconditionError(f"{g} is not a symmetry: anticommutes with {p}")
    return SymmetryBasis(m.generators, m.targets, m.rotations, m.chars, m.signs)


def taper(h: PauliSum, basis: SymmetryBasis, sector) -> PauliSum:
    """Rotate, fix each target qubit to its sector eigenvalue and remove it."""
    if not basis.built:
        raise PreconditionError("rotations have not been built")
    sector = [int(s) for s in sector]
    if len(sector) != basis.k:
        raise DimensionError(f"sector has {len(sector)} entries, basis has {basis.k} generators")
    if any(s not in (1, -1) for s in sector):
        raise ValueError("sector values must be +1 or -1")
    rotated = conjugate_sum(h, basis.clifford_rotations)
    fixed = {
        q: (ch, sign * val)
        for q, ch, sign, val in zip(basis.single_qubit_targets, basis.target_paulis, basis.signs, sector)
    }
    for p in rotated:
        for q, (ch, _) in fixed.items():
            if p[q] not in ("I", ch):
                raise AssertionError(f"rotated term {p} is not diagonal on target qubit {q}")
    return fix_qubits(rotated, fixed)


def select_sector(h: PauliSum, basis: SymmetryBasis, strategy: str = "exhaustive", sector=None,
                  limit: int = SECTOR_ENUMERATION_LIMIT, max_qubits: int = ORACLE_LIMIT) -> tuple[int, ...]:
    """Choose the symmetry sector: lowest tapered ground energy, or a given one."""
    if strategy == "explicit" or sector is not None:
        if sector is None:
            raise PreconditionError("explicit strategy needs a sector")
        sector = tuple(int(s) for s in sector)
        if len(sector) != basis.k:
            raise DimensionError(f"sector has {len(sector)} entries, basis has {basis.k} generators")
        return sector
    if strategy != "exhaustive":
        raise ValueError(f"unknown sector strategy {strategy!r}")
    if basis.k > limit:
        raise EnumerationLimitError(
            f"{basis.k} symmetries exceed the enumeration limit {limit}; pass an explicit sector")
    best, best_e = (), np.inf
    for cand in itertools.product((1, -1), repeat=basis.k):
        e, _ = exact_ground(taper(h, basis, cand), max_qubits)
        if e < best_e - 1e-12:
            best, best_e = cand, e
    return tuple(best)


@dataclass(frozen=True)
class TaperResult:
    hamiltonian: PauliSum
    basis: SymmetryBasis
    sector: tuple[int, ...]

    @property
    def k(self) -> int:
        return self.basis.k


def taper_hamiltonian(h: PauliSum, sector=None, limit: int = SECTOR_ENUMERATION_LIMIT) -> TaperResult:
    basis = build_rotations(find_z2_symmetries(h), h)
    chosen = select_sector(h, basis, "explicit" if sector is not None else "exhaustive", sector, limit)
    return TaperResult(taper(h, basis, chosen), basis, chosen)


def no_taper(h: PauliSum) -> TaperResult:
    return TaperResult(h, replace(SymmetryBasis([])), ())
