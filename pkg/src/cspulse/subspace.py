"""Stabilizer choice, the subspace rotation U_W and projection onto the stabilized subspace."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import gf2
from .contextual import NoncontextualSolution, NoncontextualStructure
from .errors import InfeasibleTargetError, PreconditionError
from .pauli import Phase, PauliString, PauliSum, commutes, multiply, rotate
from .stabilizers import QUARTER_TURN, fix_qubits, map_to_single_qubits


@dataclass(frozen=True)
class SubspaceSpec:
    """Stabilizers to enforce and the rotations that make them single-qubit Z's.

    ``stabilizers`` are expressed in the frame reached after the
    ``composite_rotations`` (which send the class observable sum_i r_i A_i to
    the first representative).  ``rotation_sequence`` lists (generator, angle)
    pairs; conjugation is applied in order as U^dag h U with U = exp(i angle P).
    """

    n: int
    stabilizers: list[tuple[PauliString, int]]
    composite_rotations: list[tuple[PauliString, float]] = field(default_factory=list)
    rotation_sequence: list[tuple[PauliString, float]] = field(default_factory=list)
    fixed_qubits: list[tuple[int, int]] = field(default_factory=list)
    scores: list[float] = field(default_factory=list)
    built: bool = False

    @property
    def n_reduced(self) -> int:
        return self.n - len(self.stabilizers)


@dataclass(frozen=True)
class ReducedProblem:
    h_c_reduced: PauliSum
    constant_shift: float

    @property
    def n(self) -> int:
        return self.h_c_reduced.n


@dataclass(frozen=True)
class StabilizerCandidate:
    pauli: PauliString
    eigenvalue: int
    score: float
    composite: bool = False


def composite_rotations(reps: list[PauliString], r) -> tuple[list[tuple[PauliString, float]], int]:
    """Rotations mapping sum_i r_i A_i onto +-A_1, and the resulting sign.

    Each step rotates the (A_1, A_k) plane with generator i A_k A_1, which
    anticommutes with both and commutes with every other representative.
    """
    rots: list[tuple[PauliString, float]] = []
    if not reps:
        return rots, 1
    rho = float(r[0])
    for a_k, r_k in zip(reps[1:], r[1:]):
        if r_k == 0.0:
            continue
        ph, gen = multiply(a_k, reps[0])
        sigma = (Phase(1) * ph).sign
        angle = 0.5 * math.atan2(-r_k, rho)
        rots.append((gen, sigma * angle))
        rho = math.hypot(rho, r_k)
    return rots, 1 if rho > 0 else -1


def _apply(h: PauliSum, rots: list[tuple[PauliString, float]]) -> PauliSum:
    for gen, angle in rots:
        h = rotate(h, gen, angle)
    return h


def _anticommuting_weight(h: PauliSum, p: PauliString) -> float:
    return sum(abs(c) for q, c in h.items() if not commutes(p, q))


GROUP_ENUMERATION_LIMIT = 12


def stabilizer_candidates(solution: NoncontextualSolution, structure: NoncontextualStructure,
                          h: PauliSum) -> tuple[list[StabilizerCandidate], list[tuple[PauliString, float]]]:
    """Independent stabilizers of the noncontextual ground state, least disruptive first.

    Every element of the stabilizer group generated by the q-signed
    generators (and, when classes exist, the rotated class observable) is
    scored by the summed |coefficient| of the terms of ``h`` it
    anticommutes with, measured after the composite rotations.  Candidates
    are then taken greedily by ascending score, skipping dependent ones.
    Above ``GROUP_ENUMERATION_LIMIT`` generators only the generators
    themselves are scored.
    """
    q, r = solution.assignment.q, solution.assignment.r
    rots, sign = composite_rotations(structure.representatives, r)
    rotated = _apply(h, rots)
    base = [(g, qj, False) for g, qj in zip(structure.generators, q)]
    if structure.representatives:
        base.append((structure.representatives[0], sign, True))
    if not base:
        return [], rots

    if len(base) > GROUP_ENUMERATION_LIMIT:
        elements = [StabilizerCandidate(p, v, _anticommuting_weight(rotated, p), c) for p, v, c in base]
    else:
        elements = []
        for bits in range(1, 1 << len(base)):
            phase, acc, val, comp = Phase(0), PauliString.identity(h.n), 1, False
            for j, (p, v, c) in enumerate(base):
                if (bits >> j) & 1:
                    ph, acc = multiply(acc, p)
                    phase, val, comp = phase * ph, val * v, comp or c
            elements.append(StabilizerCandidate(acc, phase.sign * val, _anticommuting_weight(rotated, acc), comp))
    elements.sort(key=lambda e: (e.score, e.pauli.label))

    chosen: list[StabilizerCandidate] = []
    for e in elements:
        if gf2.rank(gf2.to_rows([c.pauli for c in chosen] + [e.pauli])) > len(chosen):
            chosen.append(e)
            if len(chosen) == len(base):
                break
    return chosen, rots


def choose_stabilizers(solution: NoncontextualSolution, structure: NoncontextualStructure, h: PauliSum,
                       n_target: int) -> SubspaceSpec:
    """Enforce the least disruptive stabilizers until ``n_target`` qubits remain.

    ``h`` is the operator that will be projected; its terms drive the scores.
    Stabilizer sets are nested: a smaller target enforces a superset.
    """
    n = h.n
    if not 0 <= n_target <= n:
        raise InfeasibleTargetError(f"target {n_target} outside 0..{n}")
    cands, rots = stabilizer_candidates(solution, structure, h)
    need = n - n_target
    if need > len(cands):
        raise InfeasibleTargetError(
            f"reaching {n_target} qubits needs {need} stabilizers, only {len(cands)} available "
            f"(minimum reachable: {n - len(cands)})")
    chosen = cands[:need]
    use_composite = any(c.composite for c in chosen)
    return SubspaceSpec(
        n=n,
        stabilizers=[(c.pauli, c.eigenvalue) for c in chosen],
        composite_rotations=rots if use_composite else [],
        scores=[c.score for c in chosen],
    )


def min_reachable_qubits(structure: NoncontextualStructure, n: int) -> int:
    return n - len(structure.generators) - (1 if structure.representatives else 0)


def eigenvalue_of_product(target: PauliString, stabilizers: list[tuple[PauliString, int]]) -> int:
    """Eigenvalue of ``target`` on the joint eigenspace, if it is a product of the stabilizers."""
    rows = gf2.to_rows([s for s, _ in stabilizers])
    coeffs = gf2.solve(rows, gf2.to_rows([target])[0])
    if coeffs is None:
        raise PreconditionError(f"{target} is not generated by the stabilizers")
    phase, acc, val = Phase(0), PauliString.identity(target.n), 1
    for j, c in enumerate(coeffs):
        if c:
            ph, acc = multiply(acc, stabilizers[j][0])
            phase = phase * ph
            val *= stabilizers[j][1]
    assert acc == target
    # product = phase * target, so target = phase^-1 * product
    return phase.sign * val


def build_u_w(spec: SubspaceSpec) -> SubspaceSpec:
    """Fill the rotation sequence: composite rotations, then Clifford maps to single-qubit Z."""
    strings = [s for s, _ in spec.stabilizers]
    for i, a in enumerate(strings):
        for b in strings[i + 1:]:
            if not commutes(a, b):
                raise PreconditionError(f"stabilizers {a} and {b} do not commute")
    m = map_to_single_qubits(strings, allowed="Z")
    fixed = []
    for g, q, s in zip(m.generators, m.targets, m.signs):
        fixed.append((q, s * eigenvalue_of_product(g, list(spec.stabilizers))))
    seq = list(spec.composite_rotations) + [(p, QUARTER_TURN) for p in m.rotations]
    return replace(spec, rotation_sequence=seq, fixed_qubits=sorted(fixed), built=True)


def project(h: PauliSum, spec: SubspaceSpec) -> ReducedProblem:
    """Rotate ``h`` by U_W, keep what survives the stabilizer projector, drop fixed qubits."""
    if not spec.built:
        spec = build_u_w(spec)
    rotated = _apply(h, spec.rotation_sequence)
    reduced = fix_qubits(rotated, {q: ("Z", v) for q, v in spec.fixed_qubits})
    return ReducedProblem(reduced.without_identity(), reduced.identity_coefficient)
