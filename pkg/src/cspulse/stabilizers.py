"""Clifford reduction of commuting Pauli sets to single-qubit operators.

Shared by qubit tapering and the contextual-subspace projection.  Every
rotation is a pi/4 Pauli exponential, so conjugating a Pauli sum stays a
Pauli sum with exact signs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import gf2
from .errors import DimensionError, PreconditionError, RankError
from .pauli import PauliString, PauliSum, commutes, multiply, rotate, rotate_string

QUARTER_TURN = math.pi / 4


@dataclass(frozen=True)
class SingleQubitMap:
    """Result of :func:`map_to_single_qubits`.

    ``generators[j]`` conjugated through ``rotations`` (in order) equals
    ``signs[j]`` times the single-qubit Pauli ``chars[j]`` on ``targets[j]``.
    The generator list spans the same group as the input but may differ from
    it by products.
    """

    generators: list[PauliString]
    rotations: list[PauliString]
    targets: list[int]
    chars: list[str]
    signs: list[int]


def conjugate_string(p: PauliString, rotations: list[PauliString]) -> tuple[int, PauliString]:
    sign = 1
    for r in rotations:
        s, p = rotate_string(p, r, QUARTER_TURN)
        sign *= s
    return sign, p


def conjugate_sum(h: PauliSum, rotations: list[PauliString]) -> PauliSum:
    for r in rotations:
        h = rotate(h, r, QUARTER_TURN)
    return h


def _strip(p: PauliString, q: PauliString) -> PauliString:
    return multiply(p, q)[1]


def map_to_single_qubits(generators: list[PauliString], allowed: str = "XZ") -> SingleQubitMap:
    """Find pi/4 rotations sending each generator to a distinct single-qubit Pauli.

    ``allowed`` lists the permitted target Paulis ("XZ" for tapering, "Z" for
    subspace projection).  Generators must pairwise commute and be independent.
    """
    if not generators:
        return SingleQubitMap([], [], [], [], [])
    n = generators[0].n
    for g in generators:
        if g.n != n:
            raise DimensionError("generators must share a qubit count")
    for i, a in enumerate(generators):
        for b in generators[i + 1:]:
            if not commutes(a, b):
                raise PreconditionError(f"generators {a} and {b} do not commute")
    if gf2.rank(gf2.to_rows(generators)) != len(generators):
        raise RankError("generators are not independent")

    rotations: list[PauliString] = []
    new_gens: list[PauliString] = []
    targets: list[int] = []
    chars: list[str] = []
    for g in generators:
        _, img = conjugate_string(g, rotations)
        for j, q in enumerate(targets):
            if img[q] != "I":
                img = _strip(img, PauliString.single(n, q, chars[j]))
                g = _strip(g, new_gens[j])
        free = [q for q in img.support() if q not in targets]
        if not free:
            raise RankError(f"generator {g} is dependent on earlier ones")
        q = free[0]
        if img[q] in "XY" and not (img.weight == 1 and img[q] == "X" and "X" in allowed):
            rotations.append(_strip(img, PauliString.single(n, q, "Z")))
            char = "Z"
        elif img.weight > 1:
            rotations.append(_strip(img, PauliString.single(n, q, "X")))
            char = "X"
        else:
            char = img[q]
        if char not in allowed:
            rotations.append(PauliString.single(n, q, "Y"))
            char = "Z"
        new_gens.append(g)
        targets.append(q)
        chars.append(char)

    signs = []
    for g, q, ch in zip(new_gens, targets, chars):
        s, img = conjugate_string(g, rotations)
        if img != PauliString.single(n, q, ch):
            raise AssertionError(f"rotation failed for {g}: got {img}")
        signs.append(s)
    return SingleQubitMap(new_gens, rotations, targets, chars, signs)


def fix_qubits(h: PauliSum, fixed: dict[int, tuple[str, int]]) -> PauliSum:
    """Project ``h`` onto fixed single-qubit eigenvalues and delete those qubits.

    ``fixed`` maps qubit -> (Pauli char, eigenvalue).  Terms acting on a fixed
    qubit with any other non-identity Pauli anticommute with the stabilizer and
    vanish under projection.
    """
    n_out = h.n - len(fixed)
    keep = [q for q in range(h.n) if q not in fixed]
    out: list[tuple[PauliString, float]] = []
    for p, c in h.items():
        coeff = c
        for q, (ch, val) in fixed.items():
            f = p[q]
            if f == "I":
                continue
            if f != ch:
                coeff = 0.0
                break
            coeff *= val
        if coeff == 0.0:
            continue
        out.append((PauliString.from_label("".join(p[q] for q in keep)), coeff))
    return PauliSum(out, n=n_out)
