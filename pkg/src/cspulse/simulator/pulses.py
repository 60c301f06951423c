"""Pulse schedules on a transmon-like device model.

Drive envelopes are sampled once per dt, as an arbitrary waveform
generator would emit them, and held constant across the sample.  Within
the rotating frame and the rotating-wave approximation:

* a single-qubit instruction contributes
  (rabi * amplitude * s / 2)(cos(angle) X + sin(angle) Y) + (detuning / 2) Z,
* a cross-resonance instruction on (control, target) contributes
  cr * amplitude * s * (cos(angle) ZX + sin(angle) ZY).

Both square to a multiple of the identity, so each step is propagated by
the closed-form exponential on the 2x2 or 4x4 channel block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..errors import DimensionError, PreconditionError
from ..pauli import check_state
from .gates import apply_matrix

DURATION_QUANTUM = 16
SINGLE_QUBIT_BASE_DT = 32
CROSS_RESONANCE_BASE_DT = 64
ENVELOPES = ("square", "gaussian_square")

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_ZX = np.kron(_Z, _X)
_ZY = np.kron(_Z, _Y)


def quantize(duration: float) -> int:
    """Round half up to the duration grid, never below one quantum."""
    return DURATION_QUANTUM * max(1, math.floor(duration / DURATION_QUANTUM + 0.5))


@dataclass(frozen=True)
class PulseInstruction:
    channel: tuple[int, ...]
    amplitude: float
    angle: float
    duration: int
    detuning: float = 0.0
    envelope: str = "square"

    def __post_init__(self):
        ch = (self.channel,) if isinstance(self.channel, int) else tuple(self.channel)
        object.__setattr__(self, "channel", ch)
        if len(ch) not in (1, 2) or (len(ch) == 2 and ch[0] == ch[1]):
            raise ValueError(f"channel must be a qubit or an ordered pair, got {ch}")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError(f"amplitude {self.amplitude} outside [0, 1]")
        if not -math.pi <= self.angle <= math.pi:
            raise ValueError(f"angle {self.angle} outside [-pi, pi]")
        if self.duration <= 0 or self.duration % DURATION_QUANTUM:
            raise ValueError(f"duration {self.duration} must be a positive multiple of {DURATION_QUANTUM}")
        if self.envelope not in ENVELOPES:
            raise ValueError(f"unknown envelope {self.envelope!r}")
        if len(ch) == 2 and self.detuning != 0.0:
            raise ValueError("detuning applies to single-qubit channels only")

    def samples(self) -> np.ndarray:
        """Envelope value for each dt sample."""
        t = np.arange(self.duration) + 0.5
        if self.envelope == "square":
            return np.ones(self.duration)
        sigma = self.duration / 16
        rise = 2 * sigma
        g0 = math.exp(-rise ** 2 / (2 * sigma ** 2))
        edge = np.minimum(np.minimum(t, self.duration - t), rise)
        g = np.exp(-(edge - rise) ** 2 / (2 * sigma ** 2))
        return (g - g0) / (1 - g0)


@dataclass(frozen=True)
class DeviceModel:
    n: int
    coupling_pairs: tuple[tuple[int, int], ...] = ()
    rabi_rate_per_amplitude: float = 0.1
    cr_rate_per_amplitude: float = 0.02
    dt_seconds: float = 0.22e-9
    qubit_frequency: float = 5.0

    def __post_init__(self):
        object.__setattr__(self, "coupling_pairs", tuple(tuple(p) for p in self.coupling_pairs))
        if self.rabi_rate_per_amplitude <= 0 or self.cr_rate_per_amplitude <= 0 or self.dt_seconds <= 0:
            raise ValueError("rates and dt must be positive")
        for a, b in self.coupling_pairs:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise ValueError(f"coupling pair {(a, b)} out of range")

    @classmethod
    def linear(cls, n: int, **kw) -> "DeviceModel":
        return cls(n, tuple((q, q + 1) for q in range(n - 1)), **kw)

    @classmethod
    def load(cls, path: str | Path) -> "DeviceModel":
        doc = json.loads(Path(path).read_text())
        doc["coupling_pairs"] = tuple(tuple(p) for p in doc.get("coupling_pairs", ()))
        return cls(**doc)


@dataclass(frozen=True)
class PulseSchedule:
    """Instructions with integer start times; instructions sharing a qubit never overlap."""

    n: int
    entries: tuple[tuple[int, PulseInstruction], ...] = ()

    def __post_init__(self):
        entries = tuple(sorted(self.entries, key=lambda e: e[0]))
        object.__setattr__(self, "entries", entries)
        busy: dict[int, list[tuple[int, int]]] = {}
        for start, ins in entries:
            if start < 0:
                raise ValueError("negative start time")
            for q in ins.channel:
                if not 0 <= q < self.n:
                    raise IndexError(f"qubit {q} out of range for {self.n} qubits")
                for a, b in busy.get(q, []):
                    if start < b and a < start + ins.duration:
                        raise ValueError(f"instructions overlap on qubit {q}")
                busy.setdefault(q, []).append((start, start + ins.duration))

    @classmethod
    def asap(cls, n: int, instructions: Iterable[PulseInstruction]) -> "PulseSchedule":
        """Start each instruction as soon as all of its qubits are free."""
        free = [0] * n
        entries = []
        for ins in instructions:
            for q in ins.channel:
                if not 0 <= q < n:
                    raise IndexError(f"qubit {q} out of range for {n} qubits")
            start = max(free[q] for q in ins.channel)
            for q in ins.channel:
                free[q] = start + ins.duration
            entries.append((start, ins))
        return cls(n, tuple(entries))

    @property
    def instructions(self) -> list[PulseInstruction]:
        return [ins for _, ins in self.entries]

    @property
    def total_duration_dt(self) -> int:
        return max((s + ins.duration for s, ins in self.entries), default=0)

    def append(self, ins: PulseInstruction) -> "PulseSchedule":
        start = max((s + i.duration for s, i in self.entries if set(i.channel) & set(ins.channel)), default=0)
        return PulseSchedule(self.n, self.entries + ((start, ins),))


def _propagator(h: np.ndarray, lam: float, tau: float) -> np.ndarray:
    """exp(-i h tau) for a Hermitian h with h @ h = lam^2 I."""
    eye = np.eye(h.shape[0], dtype=complex)
    if lam == 0.0:
        return eye
    return math.cos(lam * tau) * eye - 1j * (math.sin(lam * tau) / lam) * h


def _drive(ins: PulseInstruction, d: DeviceModel, env: float) -> tuple[np.ndarray, float]:
    c, s = math.cos(ins.angle), math.sin(ins.angle)
    if len(ins.channel) == 1:
        v = np.array([d.rabi_rate_per_amplitude * ins.amplitude * env * c / 2,
                      d.rabi_rate_per_amplitude * ins.amplitude * env * s / 2,
                      ins.detuning / 2])
        return v[0] * _X + v[1] * _Y + v[2] * _Z, float(np.linalg.norm(v))
    w = d.cr_rate_per_amplitude * ins.amplitude * env
    return w * (c * _ZX + s * _ZY), abs(w)


def _step_times(duration: int, step_dt: float) -> list[tuple[float, float]]:
    """(midpoint, length) of each integration step covering [0, duration)."""
    steps, t = [], 0.0
    while t < duration - 1e-12:
        h = min(step_dt, duration - t)
        steps.append((t + h / 2, h))
        t += h
    return steps


def instruction_unitary(ins: PulseInstruction, d: DeviceModel, step_dt: float = 1.0) -> np.ndarray:
    env = ins.samples()
    u = np.eye(1 << len(ins.channel), dtype=complex)
    for mid, h in _step_times(ins.duration, step_dt):
        k = min(int(mid), ins.duration - 1)
        drive, lam = _drive(ins, d, float(env[k]))
        u = _propagator(drive, lam, h) @ u
    return u


def _check_channels(s: PulseSchedule, d: DeviceModel) -> None:
    if s.n != d.n:
        raise DimensionError(f"schedule has {s.n} qubits, device {d.n}")
    pairs = set(d.coupling_pairs)
    for ins in s.instructions:
        if len(ins.channel) == 2 and ins.channel not in pairs:
            raise PreconditionError(f"channel {ins.channel} is not a coupled pair of the device")


def run_pulse(s: PulseSchedule, d: DeviceModel, initial: np.ndarray, step_dt: float = 1.0,
              frame: str = "rotating") -> np.ndarray:
    """Evolve ``initial`` under the schedule.

    Instructions that overlap in time act on disjoint qubits and therefore
    commute, so each one is propagated on its own block in start order.
    ``frame="lab"`` integrates the undriven-frame expression
    s(t) V (cos(angle) sin(wd t) - sin(angle) cos(wd t)) (cos(wq t) Y - sin(wq t) X)
    on a single qubit, for validating the rotating-wave reduction.
    """
    if step_dt <= 0:
        raise ValueError("step_dt must be positive")
    _check_channels(s, d)
    check_state(initial, s.n)
    if frame == "lab":
        return _run_lab(s, d, np.asarray(initial, dtype=complex), step_dt)
    if frame != "rotating":
        raise ValueError(f"unknown frame {frame!r}")
    state = np.asarray(initial, dtype=complex)
    for _, ins in s.entries:
        state = apply_matrix(state, instruction_unitary(ins, d, step_dt), ins.channel, s.n)
    return state


def _run_lab(s: PulseSchedule, d: DeviceModel, state: np.ndarray, step_dt: float) -> np.ndarray:
    if s.n != 1:
        raise PreconditionError("the lab-frame integrator is a single-qubit validation mode")
    wq = d.qubit_frequency
    for start, ins in s.entries:
        env = ins.samples()
        wd = wq + ins.detuning
        c, sn = math.cos(ins.angle), math.sin(ins.angle)
        for mid, h in _step_times(ins.duration, step_dt):
            t = start + mid
            k = min(int(mid), ins.duration - 1)
            f = d.rabi_rate_per_amplitude * ins.amplitude * env[k] * (c * math.sin(wd * t) - sn * math.cos(wd * t))
            hx, hy = -f * math.sin(wq * t), f * math.cos(wq * t)
            state = _propagator(hx * _X + hy * _Y, math.hypot(hx, hy), h) @ state
    return state


# ----------------------------------------------------------------------------
# layered ansatz


def pulse_parameter_count(n: int, layers: int, coupling_pairs: Sequence[tuple[int, int]]) -> int:
    return layers * (3 * n + 3 * len(coupling_pairs))


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2 * math.pi) - math.pi


def _instruction(channel, amp: float, angle: float, scale: float, base: int) -> PulseInstruction:
    # a negative amplitude is the same drive with the phase flipped
    if amp < 0:
        amp, angle = -amp, angle + math.pi
    duration = quantize(base * min(max(scale, 0.0), 1.0))
    return PulseInstruction(channel, min(amp, 1.0), _wrap(angle), duration)


def build_pulse_ansatz(n: int, layers: int, coupling_pairs: Sequence[tuple[int, int]],
                       params: Sequence[float]) -> PulseSchedule:
    """Per layer: one drive per qubit, then one cross-resonance drive per coupled pair.

    Each instruction takes (amplitude, angle, duration scale); the scale in
    [0, 1] is a fraction of the channel's base duration, rounded to the grid.
    """
    params = np.asarray(params, dtype=float)
    pairs = [tuple(p) for p in coupling_pairs]
    count = pulse_parameter_count(n, layers, pairs)
    if params.shape != (count,):
        raise DimensionError(f"expected {count} parameters, got {params.size}")
    triples = params.reshape(-1, 3)
    out, i = [], 0
    for _ in range(layers):
        for q in range(n):
            out.append(_instruction(q, *triples[i], SINGLE_QUBIT_BASE_DT))
            i += 1
        for p in pairs:
            out.append(_instruction(p, *triples[i], CROSS_RESONANCE_BASE_DT))
            i += 1
    return PulseSchedule.asap(n, out)


def default_pulse_parameters(n: int, layers: int, coupling_pairs: Sequence[tuple[int, int]],
                             seed: int = 0, spread: float = 0.05) -> np.ndarray:
    """Small seeded amplitudes and angles at full duration."""
    rng = np.random.default_rng(seed)
    triples = np.empty((pulse_parameter_count(n, layers, coupling_pairs) // 3, 3))
    triples[:, 0] = rng.uniform(-spread, spread, len(triples))
    triples[:, 1] = rng.uniform(-math.pi, math.pi, len(triples))
    triples[:, 2] = 1.0
    return triples.reshape(-1)
