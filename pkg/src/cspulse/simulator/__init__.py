"""Statevector simulation of gate circuits and pulse schedules."""

from .estimator import EnergyEstimate, estimate_energy, sample_energy
from .gates import CNOT, DEFAULT_TIMING, GateCircuit, Rotation, build_su2_ansatz, run_gate
from .pulses import DeviceModel, PulseInstruction, PulseSchedule, build_pulse_ansatz, run_pulse
from .timing import duration_of

__all__ = [
    "CNOT", "DEFAULT_TIMING", "DeviceModel", "EnergyEstimate", "GateCircuit", "PulseInstruction",
    "PulseSchedule", "Rotation", "build_pulse_ansatz", "build_su2_ansatz", "duration_of",
    "estimate_energy", "run_gate", "run_pulse", "sample_energy",
]
