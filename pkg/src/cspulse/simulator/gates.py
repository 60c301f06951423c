"""Gate-level circuits: rotations and CNOTs on a dense statevector."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import DimensionError
from ..pauli import check_state

DEFAULT_TIMING: Mapping[str, int] = {"rx": 32, "ry": 32, "rz": 32, "cx": 144}

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class Rotation:
    """exp(-i angle/2 sigma_axis) on one qubit."""

    axis: str
    qubit: int
    angle: float

    def __post_init__(self):
        if self.axis not in _PAULI:
            raise ValueError(f"unknown rotation axis {self.axis!r}")

    @property
    def name(self) -> str:
        return "r" + self.axis

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.angle / 2), np.sin(self.angle / 2)
        return c * np.eye(2) - 1j * s * _PAULI[self.axis]


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")

    name = "cx"

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)

    def matrix(self) -> np.ndarray:
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = _PAULI["x"]
        return m


Op = Rotation | CNOT


def load_timing(path: str | Path) -> dict[str, int]:
    """Timing table from a JSON object of gate name -> duration in dt."""
    table = json.loads(Path(path).read_text())
    if not isinstance(table, dict) or not all(isinstance(v, int) and v >= 0 for v in table.values()):
        raise ValueError(f"{path}: timing table must map gate names to non-negative integers")
    return table


@dataclass(frozen=True)
class GateCircuit:
    n: int
    ops: tuple[Op, ...] = ()
    timing: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_TIMING), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            for q in op.qubits:
                if not 0 <= q < self.n:
                    raise IndexError(f"qubit {q} out of range for {self.n} qubits")

    @property
    def duration_dt(self) -> int:
        from .timing import duration_of
        return duration_of(self)

    def append(self, op: Op) -> "GateCircuit":
        return GateCircuit(self.n, self.ops + (op,), self.timing)

    def unitary(self) -> np.ndarray:
        dim = 1 << self.n
        return np.column_stack([run_gate(self, np.eye(dim, dtype=complex)[:, b]) for b in range(dim)])


def apply_matrix(state: np.ndarray, m: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to ``qubits`` (first listed qubit is most significant)."""
    k = len(qubits)
    psi = np.moveaxis(state.reshape((2,) * n), list(qubits), list(range(k)))
    shape = psi.shape
    psi = (m @ psi.reshape(1 << k, -1)).reshape(shape)
    return np.moveaxis(psi, list(range(k)), list(qubits)).reshape(-1)


def run_gate(c: GateCircuit, initial: np.ndarray) -> np.ndarray:
    check_state(initial, c.n)
    state = np.asarray(initial, dtype=complex)
    for op in c.ops:
        state = apply_matrix(state, op.matrix(), op.qubits, c.n)
    return state


def su2_parameter_count(n: int, layers: int) -> int:
    return 2 * n * (layers + 1)


def build_su2_ansatz(n: int, layers: int, params: Sequence[float],
                     timing: Mapping[str, int] | None = None) -> GateCircuit:
    """RY and RZ blocks on every qubit, a linear CNOT ladder between blocks, and a final rotation block."""
    params = np.asarray(params, dtype=float)
    if n < 1 or layers < 0:
        raise DimensionError("need n >= 1 and layers >= 0")
    if params.shape != (su2_parameter_count(n, layers),):
        raise DimensionError(f"expected {su2_parameter_count(n, layers)} parameters, got {params.size}")
    ops: list[Op] = []
    it = iter(params)
    for layer in range(layers + 1):
        ops += [Rotation("y", q, float(next(it))) for q in range(n)]
        ops += [Rotation("z", q, float(next(it))) for q in range(n)]
        if layer < layers:
            ops += [CNOT(q, q + 1) for q in range(n - 1)]
    return GateCircuit(n, tuple(ops), dict(timing or DEFAULT_TIMING))
