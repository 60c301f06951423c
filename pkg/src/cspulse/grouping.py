"""Commuting-group measurement reduction.

Terms are partitioned by greedy colouring of the conflict graph (an edge
joins two terms that may not be measured together).  Qubit-wise groups
come with a single-qubit basis change; general-commutation groups are only
counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PreconditionError
from .pauli import PauliString, PauliSum, commutes, qubitwise_commutes
from .simulator.gates import Rotation

QUBITWISE = "qubitwise"
GENERAL = "general"


@dataclass(frozen=True)
class MeasurementGroup:
    members: list[tuple[PauliString, float]]
    mode: str
    basis_string: PauliString | None = None

    @property
    def strings(self) -> list[PauliString]:
        return [p for p, _ in self.members]


@dataclass(frozen=True)
class GroupingReport:
    original_count: int
    grouped_count: int
    mode: str

    def as_row(self) -> dict:
        return {"mode": self.mode, "original_count": self.original_count, "grouped_count": self.grouped_count}


def _relation(mode: str):
    if mode == QUBITWISE:
        return qubitwise_commutes
    if mode == GENERAL:
        return commutes
    raise ValueError(f"unknown grouping mode {mode!r}")


def group(h: PauliSum, mode: str = QUBITWISE) -> list[MeasurementGroup]:
    if len(h) == 0:
        raise PreconditionError("nothing to group")
    ok = _relation(mode)
    items = h.sorted_items()
    m = len(items)
    adj = [set() for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if not ok(items[i][0], items[j][0]):
                adj[i].add(j)
                adj[j].add(i)
    order = sorted(range(m), key=lambda i: (-len(adj[i]), items[i][0].label))
    colour: dict[int, int] = {}
    for v in order:
        taken = {colour[u] for u in adj[v] if u in colour}
        colour[v] = next(c for c in range(m) if c not in taken)
    buckets: dict[int, list[int]] = {}
    for v in order:
        buckets.setdefault(colour[v], []).append(v)
    groups = []
    for c in sorted(buckets):
        members = [items[i] for i in sorted(buckets[c], key=lambda i: items[i][0].label)]
        basis = _cover(h.n, [p for p, _ in members]) if mode == QUBITWISE else None
        groups.append(MeasurementGroup(members, mode, basis))
    return groups


def _cover(n: int, strings: list[PauliString]) -> PauliString:
    x = z = 0
    for p in strings:
        x |= p.x
        z |= p.z
    return PauliString(x, z, n)


def grouping_report(h: PauliSum, mode: str = QUBITWISE) -> GroupingReport:
    return GroupingReport(len(h), len(group(h, mode)), mode)


def basis_circuit(g: MeasurementGroup) -> list[Rotation]:
    """Single-qubit rotations taking the group's shared basis to the Z basis.

    X is measured after RY(-pi/2), Y after RX(pi/2).
    """
    if g.mode != QUBITWISE:
        raise PreconditionError("measurement circuits are only synthesized for qubit-wise groups")
    ops = []
    for q in range(g.basis_string.n):
        ch = g.basis_string[q]
        if ch == "X":
            ops.append(Rotation("y", q, -math.pi / 2))
        elif ch == "Y":
            ops.append(Rotation("x", q, math.pi / 2))
    return ops
