import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from cspulse.errors import DimensionError, PreconditionError
from cspulse.grouping import group
from cspulse.pauli import PauliSum, exact_ground, expectation
from cspulse.simulator import (
    CNOT, DEFAULT_TIMING, DeviceModel, GateCircuit, PulseInstruction, PulseSchedule, Rotation,
    build_pulse_ansatz, build_su2_ansatz, duration_of, estimate_energy, run_gate, run_pulse, sample_energy,
)
from cspulse.simulator.gates import load_timing
from cspulse.simulator.pulses import (
    default_pulse_parameters, instruction_unitary, pulse_parameter_count, quantize,
)

from conftest import kron_matrix

PAULI = {"x": kron_matrix("X"), "y": kron_matrix("Y"), "z": kron_matrix("Z")}


def basis(n, b=0):
    s = np.zeros(1 << n, dtype=complex)
    s[b] = 1
    return s


def embed(m, qubits, n):
    """Dense oracle for a gate on ``qubits``: sum over matrix elements with kron products."""
    full = np.zeros((1 << n, 1 << n), dtype=complex)
    k = len(qubits)
    for r in range(1 << k):
        for c in range(1 << k):
            if m[r, c] == 0:
                continue
            factors = []
            for q in range(n):
                if q in qubits:
                    j = k - 1 - qubits.index(q)
                    e = np.zeros((2, 2))
                    e[(r >> j) & 1, (c >> j) & 1] = 1
                    factors.append(e)
                else:
                    factors.append(np.eye(2))
            t = factors[0]
            for f in factors[1:]:
                t = np.kron(t, f)
            full += m[r, c] * t
    return full


def random_circuit(rng, n, k):
    ops = []
    for _ in range(k):
        if n > 1 and rng.random() < 0.4:
            a, b = rng.choice(n, 2, replace=False)
            ops.append(CNOT(int(a), int(b)))
        else:
            ops.append(Rotation(str(rng.choice(list("xyz"))), int(rng.integers(n)), float(rng.uniform(-4, 4))))
    return GateCircuit(n, tuple(ops))


def random_schedule(rng, n=3, k=6):
    dev = DeviceModel.linear(n)
    ins = []
    for _ in range(k):
        if rng.random() < 0.4:
            ch = dev.coupling_pairs[int(rng.integers(len(dev.coupling_pairs)))]
            ins.append(PulseInstruction(ch, float(rng.uniform(0, 1)), float(rng.uniform(-3, 3)),
                                        16 * int(rng.integers(1, 8)), envelope=str(rng.choice(["square", "gaussian_square"]))))
        else:
            ins.append(PulseInstruction(int(rng.integers(n)), float(rng.uniform(0, 1)), float(rng.uniform(-3, 3)),
                                        16 * int(rng.integers(1, 8)), float(rng.uniform(-0.05, 0.05)),
                                        str(rng.choice(["square", "gaussian_square"]))))
    return PulseSchedule.asap(n, ins), dev


# ---------------------------------------------------------------- gates


def test_empty_circuit_and_y_flip():
    psi = basis(2, 2)
    assert np.allclose(run_gate(GateCircuit(2), psi), psi)
    out = run_gate(GateCircuit(1, (Rotation("y", 0, math.pi),)), basis(1))
    assert abs(abs(out[1]) - 1) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_random_circuit_matches_dense_product(seed):
    rng = np.random.default_rng(seed)
    n = 3
    c = random_circuit(rng, n, 5)
    u = np.eye(1 << n, dtype=complex)
    for op in c.ops:
        if isinstance(op, Rotation):
            g = scipy.linalg.expm(-0.5j * op.angle * PAULI[op.axis])
        else:
            g = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
        u = embed(g, list(op.qubits), n) @ u
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    out = run_gate(c, psi)
    assert np.allclose(out, u @ psi)
    assert abs(np.linalg.norm(out) - 1) < 1e-12


def test_gate_errors():
    with pytest.raises(IndexError):
        GateCircuit(2, (CNOT(0, 2),))
    with pytest.raises(ValueError):
        Rotation("w", 0, 1.0)
    with pytest.raises(DimensionError):
        build_su2_ansatz(3, 1, np.zeros(5))


def test_su2_structure_and_durations():
    c0 = build_su2_ansatz(3, 0, np.zeros(6))
    assert not any(isinstance(op, CNOT) for op in c0.ops)
    c = build_su2_ansatz(3, 2, np.zeros(18))
    assert np.allclose(run_gate(c, basis(3)), basis(3))
    # hand schedule: (layers + 1) rotation blocks of RY then RZ, layers ladders of n - 1 serial CNOTs
    assert c.duration_dt == 3 * (32 + 32) + 2 * 2 * 144 == 768
    assert duration_of(build_su2_ansatz(3, 3, np.zeros(24))) == 4 * 64 + 3 * 2 * 144
    assert duration_of(GateCircuit(2)) == 0
    assert duration_of(GateCircuit(2, (CNOT(0, 1),))) == DEFAULT_TIMING["cx"] == 144
    with pytest.raises(PreconditionError):
        duration_of(GateCircuit(2, (CNOT(0, 1),), timing={"rx": 1}))


def test_timing_table_file(tmp_path):
    path = tmp_path / "t.json"
    path.write_text('{"rx": 10, "ry": 10, "rz": 0, "cx": 50}')
    table = load_timing(path)
    assert duration_of(build_su2_ansatz(2, 1, np.zeros(8), table)) == 2 * 10 + 50
    path.write_text('{"cx": -1}')
    with pytest.raises(ValueError):
        load_timing(path)


# ---------------------------------------------------------------- pulses


def test_instruction_validation():
    with pytest.raises(ValueError):
        PulseInstruction(0, 1.5, 0.0, 32)
    with pytest.raises(ValueError):
        PulseInstruction(0, 0.5, 4.0, 32)
    with pytest.raises(ValueError):
        PulseInstruction(0, 0.5, 0.0, 30)
    with pytest.raises(ValueError):
        PulseInstruction((0, 0), 0.5, 0.0, 32)
    with pytest.raises(ValueError):
        PulseSchedule(2, ((0, PulseInstruction(0, 0.1, 0, 32)), (16, PulseInstruction((0, 1), 0.1, 0, 32))))
    assert quantize(3) == 16 and quantize(40) == 48


def test_zero_amplitude_is_identity():
    s = build_pulse_ansatz(2, 1, [(0, 1)], [0, 0, 1] * 3)
    assert s.total_duration_dt > 0
    psi = np.array([0.6, 0, 0.8j, 0])
    assert np.allclose(run_pulse(s, DeviceModel.linear(2), psi), psi)


@pytest.mark.parametrize("amp,dur", [(0.3, 160), (1.0, 32), (0.05, 512)])
def test_rabi_rotation(amp, dur):
    d = DeviceModel(1)
    s = PulseSchedule.asap(1, [PulseInstruction(0, amp, 0.0, dur)])
    theta = d.rabi_rate_per_amplitude * amp * dur
    expected = np.array([math.cos(theta / 2), -1j * math.sin(theta / 2)])
    assert np.max(np.abs(run_pulse(s, d, basis(1)) - expected)) < 1e-10


def test_cross_resonance_is_zx_rotation():
    d = DeviceModel.linear(2)
    ins = PulseInstruction((0, 1), 0.7, 0.0, 64)
    u = instruction_unitary(ins, d)
    theta = d.cr_rate_per_amplitude * 0.7 * 64
    assert np.allclose(u, scipy.linalg.expm(-1j * theta * kron_matrix("ZX")), atol=1e-12)


def test_gaussian_square_envelope():
    env = PulseInstruction(0, 1.0, 0.0, 128, envelope="gaussian_square").samples()
    assert env.max() == pytest.approx(1.0) and env[0] < 0.05 and np.allclose(env, env[::-1])


@pytest.mark.parametrize("seed", range(4))
def test_unitarity(seed):
    rng = np.random.default_rng(seed)
    s, d = random_schedule(rng)
    cols = np.column_stack([run_pulse(s, d, basis(3, b)) for b in range(8)])
    assert np.max(np.abs(cols.conj().T @ cols - np.eye(8))) < 1e-8


@pytest.mark.parametrize("seed", range(4))
def test_step_refinement(seed):
    rng = np.random.default_rng(seed + 100)
    s, d = random_schedule(rng)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    assert np.linalg.norm(run_pulse(s, d, psi) - run_pulse(s, d, psi, step_dt=1 / 16)) < 1e-6


@given(st.floats(-math.pi, math.pi), st.sampled_from(["x", "y"]))
@settings(max_examples=30)
def test_single_qubit_rotations_from_pulses(theta, axis):
    d = DeviceModel(1)
    dur = 64
    amp = abs(theta) / (d.rabi_rate_per_amplitude * dur)
    angle = (0.0 if axis == "x" else math.pi / 2) + (0.0 if theta >= 0 else math.pi)
    angle = (angle + math.pi) % (2 * math.pi) - math.pi
    s = PulseSchedule.asap(1, [PulseInstruction(0, amp, angle, dur)])
    psi = np.array([0.6, 0.8j])
    ref = run_gate(GateCircuit(1, (Rotation(axis, 0, theta),)), psi)
    assert np.max(np.abs(run_pulse(s, d, psi) - ref)) < 1e-8


def test_pulse_rx_half_pi_matches_gate():
    d = DeviceModel(1)
    amp = (math.pi / 2) / (d.rabi_rate_per_amplitude * 32)
    s = build_pulse_ansatz(1, 1, [], [amp, 0.0, 1.0])
    ref = run_gate(GateCircuit(1, (Rotation("x", 0, math.pi / 2),)), basis(1))
    assert np.max(np.abs(run_pulse(s, d, basis(1)) - ref)) < 1e-8


def test_lab_frame_agrees_with_rotating_wave_limit():
    d = DeviceModel(1, qubit_frequency=10.0)
    lab = run_pulse(PulseSchedule.asap(1, [PulseInstruction(0, 0.5, 0.3, 160)]), d, basis(1), 1 / 32, "lab")
    # the literal drive carries an extra minus sign, i.e. a pi phase shift
    rwa = run_pulse(PulseSchedule.asap(1, [PulseInstruction(0, 0.5, 0.3 - math.pi, 160)]), d, basis(1))
    assert abs(abs(np.vdot(lab, rwa)) - 1) < 1e-4
    with pytest.raises(PreconditionError):
        run_pulse(PulseSchedule(2), DeviceModel.linear(2), basis(2), frame="lab")


def test_pulse_errors():
    with pytest.raises(PreconditionError):
        run_pulse(PulseSchedule.asap(3, [PulseInstruction((0, 2), 0.1, 0, 32)]), DeviceModel.linear(3), basis(3))
    with pytest.raises(ValueError):
        run_pulse(PulseSchedule(1), DeviceModel(1), basis(1), step_dt=0)
    with pytest.raises(DimensionError):
        build_pulse_ansatz(2, 1, [(0, 1)], np.zeros(5))
    with pytest.raises(ValueError):
        DeviceModel(2, ((0, 2),))


def test_device_file(tmp_path):
    p = tmp_path / "dev.json"
    p.write_text('{"n": 3, "coupling_pairs": [[0, 1], [1, 2]], "dt_seconds": 2.2e-10}')
    d = DeviceModel.load(p)
    assert d.coupling_pairs == ((0, 1), (1, 2)) and d.rabi_rate_per_amplitude == 0.1


def test_pulse_ansatz_shorter_than_su2():
    pairs = [(0, 1), (1, 2)]
    assert pulse_parameter_count(3, 2, pairs) == 2 * (9 + 6)
    s = build_pulse_ansatz(3, 2, pairs, default_pulse_parameters(3, 2, pairs))
    assert s.total_duration_dt < build_su2_ansatz(3, 2, np.zeros(18)).duration_dt


@pytest.mark.parametrize("seed", range(3))
def test_duration_monotone_under_append(seed):
    rng = np.random.default_rng(seed)
    s, _ = random_schedule(rng)
    extra = PulseInstruction(int(rng.integers(3)), 0.2, 0.0, 32)
    assert s.append(extra).total_duration_dt >= s.total_duration_dt
    assert duration_of(s) == s.total_duration_dt


# ---------------------------------------------------------------- estimator


def test_exact_estimate_on_eigenstate():
    h = PauliSum.from_labels({"ZZ": 1.0, "XI": 0.5, "II": 0.1})
    e, v = exact_ground(h)
    assert estimate_energy(h, v) == pytest.approx(e, abs=1e-12)
    with pytest.raises(DimensionError):
        estimate_energy(h, basis(3))
    with pytest.raises(PreconditionError):
        estimate_energy(h, v, shots=10)


def test_identity_only_has_zero_variance():
    h = PauliSum.from_labels({"II": -0.75})
    est = sample_energy(h, basis(2), 1000, group(h), 0)
    assert est.value == -0.75 and est.sigma == 0.0


def test_million_shots_within_three_sigma(instances):
    h = instances["h2_sto3g"].hamiltonian
    _, v = exact_ground(h)
    rng = np.random.default_rng(5)
    psi = v + 0.3 * (rng.normal(size=v.size) + 1j * rng.normal(size=v.size))
    psi /= np.linalg.norm(psi)
    est = sample_energy(h, psi, 1_000_000, group(h), 11)
    assert abs(est.value - expectation(h, psi)) < 3 * est.sigma


def test_estimator_unbiased_over_seeds():
    h = PauliSum.from_labels({"XX": 0.7, "ZI": -0.4, "YY": 0.2})
    rng = np.random.default_rng(0)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    groups = group(h)
    vals = [sample_energy(h, psi, 500, groups, s) for s in range(400)]
    mean = np.mean([e.value for e in vals])
    assert abs(mean - expectation(h, psi)) < 4 * vals[0].sigma / math.sqrt(len(vals))
