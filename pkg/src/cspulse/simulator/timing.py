"""Critical-path durations in dt."""

from __future__ import annotations

from ..errors import PreconditionError
from .gates import GateCircuit
from .pulses import PulseSchedule


def duration_of(obj: GateCircuit | PulseSchedule) -> int:
    """As-soon-as-possible schedule length; every op blocks the qubits it touches."""
    if isinstance(obj, PulseSchedule):
        return obj.total_duration_dt
    free = [0] * obj.n
    for op in obj.ops:
        if op.name not in obj.timing:
            raise PreconditionError(f"timing table has no entry for {op.name!r}")
        start = max(free[q] for q in op.qubits)
        for q in op.qubits:
            free[q] = start + int(obj.timing[op.name])
    return max(free, default=0)
