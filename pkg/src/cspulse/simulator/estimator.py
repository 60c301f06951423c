"""Exact and shot-sampled energy estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .. import grouping as _grouping
from ..errors import DimensionError, PreconditionError
from ..pauli import PauliSum, _parity, check_state, expectation
from .gates import GateCircuit, run_gate


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    sigma: float
    shots: int


def _group_outcome_values(g, n: int) -> np.ndarray:
    """Value of the group's observable on each computational-basis outcome after the basis change."""
    idx = np.arange(1 << n, dtype=np.int64)
    vals = np.zeros(1 << n)
    for p, c in g.members:
        vals += c * (1 - 2 * _parity(idx & p.support_mask))
    return vals


def sample_energy(h: PauliSum, state: np.ndarray, shots: int, groups: Sequence, rng) -> EnergyEstimate:
    """Sample ``shots`` outcomes per group and combine the parity estimates.

    ``sigma`` is the standard error from each group's exact outcome variance.
    """
    check_state(state, h.n)
    if shots <= 0:
        raise ValueError("shots must be positive")
    rng = np.random.default_rng(rng)
    covered = {p: c for g in groups for p, c in g.members}
    if covered != {p: c for p, c in h.items() if not p.is_identity} and covered != dict(h.items()):
        raise PreconditionError("groups do not partition the Hamiltonian's terms")
    value, var = h.identity_coefficient, 0.0
    for g in groups:
        members = [(p, c) for p, c in g.members if not p.is_identity]
        if not members:
            continue
        g = _grouping.MeasurementGroup(members, g.mode, g.basis_string)
        rotated = run_gate(GateCircuit(h.n, tuple(_grouping.basis_circuit(g))), state)
        probs = np.abs(rotated) ** 2
        probs /= probs.sum()
        vals = _group_outcome_values(g, h.n)
        counts = rng.multinomial(shots, probs)
        value += float(counts @ vals) / shots
        mean = float(probs @ vals)
        var += max(float(probs @ vals ** 2) - mean ** 2, 0.0) / shots
    return EnergyEstimate(float(value), float(np.sqrt(var)), shots)


def estimate_energy(h: PauliSum, state: np.ndarray, shots: int | None = None, groups: Sequence | None = None,
                    rng=None) -> float:
    """Exact expectation, or a grouped shot estimate when ``shots`` is given."""
    if state.shape != (1 << h.n,):
        raise DimensionError(f"state of shape {state.shape} does not match {h.n} qubits")
    if shots is None:
        return expectation(h, state)
    if groups is None:
        raise PreconditionError("sampled estimation needs measurement groups")
    return sample_energy(h, state, shots, groups, rng).value
