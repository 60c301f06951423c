"""Derivative-free VQE loop and the end-to-end contextual-subspace pipeline.

The total energy is E_CSVQE = E_nc + E_c: E_nc is the classical
noncontextual optimum and E_c is the ground energy of the correction
H - E_nc restricted to the stabilized subspace, found by VQE on the
reduced qubits (or by exact diagonalization in oracle mode).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import contextual, grouping, subspace, tapering
from .errors import InfeasibleTargetError, PreconditionError, StageError
from .io import PipelineReport, ProblemInstance
from .pauli import ORACLE_LIMIT, PauliSum, exact_ground
from .simulator.estimator import estimate_energy
from .simulator.gates import build_su2_ansatz, run_gate, su2_parameter_count
from .simulator.pulses import DeviceModel, build_pulse_ansatz, default_pulse_parameters, run_pulse
from .simulator.timing import duration_of

METHODS = ("nelder_mead", "cobyla")
DEFAULT_SHOTS = 2300


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "nelder_mead"
    max_iterations: int = 100
    tolerance: float = 1e-8
    seed: int = 0
    initial_step: float = 0.5
    max_evaluations: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown optimizer {self.method!r}; choose from {METHODS}")
        if self.max_iterations <= 0:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class VqeResult:
    best_params: np.ndarray
    best_energy: float
    trace: list[tuple[int, float]]
    evaluations: int
    duration_dt: int | None = None

    def running_minimum(self) -> list[float]:
        return list(np.minimum.accumulate([e for _, e in self.trace])) if self.trace else []


def minimize(objective: Callable[[np.ndarray], float], x0: Sequence[float], config: OptimizerConfig) -> VqeResult:
    """Run Nelder-Mead or COBYLA from ``x0``, recording every evaluation."""
    x0 = np.asarray(x0, dtype=float)
    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise ValueError(f"objective is not finite at x0 ({f0})")
    trace: list[tuple[int, float]] = [(0, f0)]
    best = [f0, x0.copy()]
    budget = config.max_evaluations

    def f(x):
        if budget is not None and len(trace) >= budget:
            return best[0]
        v = float(objective(x))
        trace.append((len(trace), v))
        if v < best[0]:
            best[0], best[1] = v, np.array(x, dtype=float)
        return v

    if x0.size:
        if config.method == "nelder_mead":
            simplex = np.vstack([x0] + [x0 + config.initial_step * e for e in np.eye(x0.size)])
            _scipy_minimize(f, x0, method="Nelder-Mead",
                            options={"maxiter": config.max_iterations, "initial_simplex": simplex,
                                     "xatol": config.tolerance, "fatol": config.tolerance,
                                     "maxfev": budget or 10 ** 9})
        else:
            _scipy_minimize(f, x0, method="COBYLA", tol=config.tolerance,
                            options={"maxiter": config.max_iterations, "rhobeg": config.initial_step})
    return VqeResult(best[1], best[0], trace, len(trace))


def accuracy_of(estimated: float, reference: float) -> float:
    if reference == 0:
        raise ZeroDivisionError("reference energy is zero")
    return estimated / reference


# ----------------------------------------------------------------------------
# contextual solve


@dataclass(frozen=True)
class AnsatzConfig:
    kind: str = "gate"
    layers: int = 2
    device: DeviceModel | None = None

    def __post_init__(self):
        if self.kind not in ("gate", "pulse"):
            raise ValueError(f"unknown ansatz {self.kind!r}")
        if self.layers < 0 or (self.kind == "pulse" and self.layers < 1):
            raise ValueError("layer count too small")


def _zero_state(n: int) -> np.ndarray:
    s = np.zeros(1 << n, dtype=complex)
    s[0] = 1.0
    return s


def _sampling_rng(seed: int, params: np.ndarray) -> np.random.Generator:
    # a pure function of (seed, params): repeatable and safe across threads
    digest = hashlib.sha256(np.ascontiguousarray(params, dtype=float).tobytes()).digest()
    return np.random.default_rng([seed, *np.frombuffer(digest, dtype=np.uint32)])


def ansatz_circuit(n: int, ansatz: AnsatzConfig, seed: int = 0):
    """Initial parameters, state builder and duration function for an ansatz."""
    if ansatz.kind == "gate":

        def prepare(theta):
            return run_gate(build_su2_ansatz(n, ansatz.layers, theta), _zero_state(n))

        def duration(theta):
            return duration_of(build_su2_ansatz(n, ansatz.layers, theta))

        return np.zeros(su2_parameter_count(n, ansatz.layers)), prepare, duration
    device = ansatz.device or DeviceModel.linear(n)
    if device.n != n:
        raise PreconditionError(f"device has {device.n} qubits, ansatz needs {n}")
    pairs = list(device.coupling_pairs)

    def prepare(theta):
        return run_pulse(build_pulse_ansatz(n, ansatz.layers, pairs, theta), device, _zero_state(n))

    def duration(theta):
        return duration_of(build_pulse_ansatz(n, ansatz.layers, pairs, theta))

    return default_pulse_parameters(n, ansatz.layers, pairs, seed=seed), prepare, duration


def solve_contextual(reduced: subspace.ReducedProblem, ansatz: AnsatzConfig | str = "gate",
                     config: OptimizerConfig = OptimizerConfig(), shots: int | None = None,
                     oracle: bool = False, grouping_mode: str = grouping.QUBITWISE,
                     x0: Sequence[float] | None = None) -> VqeResult:
    """Minimize the reduced correction energy; every recorded energy includes the constant shift."""
    if isinstance(ansatz, str):
        ansatz = AnsatzConfig(ansatz)
    h, shift = reduced.h_c_reduced, reduced.constant_shift
    if h.n == 0 or len(h) == 0:
        return VqeResult(np.zeros(0), shift, [], 0, 0)
    if oracle:
        e, _ = exact_ground(h)
        return VqeResult(np.zeros(0), e + shift, [(0, e + shift)], 1, None)
    init, prepare, duration = ansatz_circuit(h.n, ansatz, config.seed)
    groups = grouping.group(h, grouping_mode) if shots is not None else None

    def objective(theta):
        state = prepare(theta)
        rng = _sampling_rng(config.seed, theta) if shots is not None else None
        return estimate_energy(h, state, shots, groups, rng) + shift

    res = minimize(objective, init if x0 is None else x0, config)
    return replace(res, duration_dt=duration(res.best_params))


# ----------------------------------------------------------------------------
# pipeline


@dataclass(frozen=True)
class PipelineOptions:
    taper: bool = True
    sector: tuple[int, ...] | None = None
    split_strategy: str = "greedy"
    n_target: int | None = None
    grouping_mode: str = grouping.QUBITWISE
    ansatz: str = "gate"
    layers: int = 2
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    shots: int | None = None
    oracle: bool = False
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sector"] = list(self.sector) if self.sector is not None else None
        return d


@dataclass(frozen=True)
class Prepared:
    """Stages that do not depend on the target qubit count."""

    instance: ProblemInstance
    tapered: tapering.TaperResult
    split: contextual.ContextualSplit
    structure: contextual.NoncontextualStructure
    solution: contextual.NoncontextualSolution
    correction: PauliSum
    reference: float | None
    reference_source: str | None

    @property
    def n(self) -> int:
        return self.tapered.hamiltonian.n

    @property
    def min_qubits(self) -> int:
        return subspace.min_reachable_qubits(self.structure, self.n)


@dataclass(frozen=True)
class PipelineResult:
    e_nc: float
    e_c: float
    e_csvqe: float
    report: PipelineReport
    vqe: VqeResult | None = None


def _stage(name: str, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def prepare(instance: ProblemInstance, options: PipelineOptions = PipelineOptions()) -> Prepared:
    h = instance.hamiltonian
    tap = _stage("taper", lambda: tapering.taper_hamiltonian(h, options.sector) if options.taper
                 else tapering.no_taper(h))
    ht = tap.hamiltonian
    sp = _stage("split", contextual.split, ht, options.split_strategy)
    st = _stage("noncontextual", contextual.decompose, list(sp.h_nc))
    sol = _stage("noncontextual", contextual.optimize_noncontextual, st, sp.h_nc, seed=options.seed)
    correction = ht - PauliSum.constant(sol.energy, ht.n)
    if instance.reference_energy is not None:
        ref, src = instance.reference_energy, "instance"
    elif h.n <= ORACLE_LIMIT:
        ref, src = exact_ground(h)[0], "exact_diagonalization"
    else:
        ref, src = None, None
    return Prepared(instance, tap, sp, st, sol, correction, ref, src)


def _group_counts(h: PauliSum) -> dict:
    if len(h) == 0:
        return {"terms": 0, "qubitwise": 0, "general": 0}
    return {"terms": len(h), "qubitwise": len(grouping.group(h, grouping.QUBITWISE)),
            "general": len(grouping.group(h, grouping.GENERAL))}


def solve_at(prep: Prepared, n_target: int, options: PipelineOptions = PipelineOptions()) -> PipelineResult:
    """Project onto ``n_target`` qubits, solve the reduced problem and assemble the energy."""
    spec = _stage("project", subspace.choose_stabilizers, prep.solution, prep.structure, prep.correction, n_target)
    spec = _stage("project", subspace.build_u_w, spec)
    reduced = _stage("project", subspace.project, prep.correction, spec)
    groups = _stage("group", lambda: {"original": _group_counts(prep.instance.hamiltonian),
                                      "tapered": _group_counts(prep.tapered.hamiltonian),
                                      "reduced": _group_counts(reduced.h_c_reduced)})
    ansatz = AnsatzConfig(options.ansatz, options.layers)
    opt = replace(options.optimizer, seed=options.seed)
    vqe = _stage("solve", solve_contextual, reduced, ansatz, opt, options.shots, options.oracle,
                 options.grouping_mode)
    e_nc, e_c = prep.solution.energy, vqe.best_energy
    e_csvqe = e_nc + e_c
    ref = prep.reference
    a = prep.solution.assignment
    h = prep.instance.hamiltonian
    report = PipelineReport(
        name=prep.instance.name,
        config=dict(options.to_dict(), n_target=n_target),
        seed=options.seed,
        n_original=h.n,
        n_tapered=prep.n,
        n_contextual=reduced.n,
        sector=list(prep.tapered.sector),
        symmetries=[g.label for g in prep.tapered.basis.generators],
        terms_original=len(h),
        terms_tapered=len(prep.tapered.hamiltonian),
        terms_noncontextual=len(prep.split.h_nc),
        terms_contextual=len(prep.split.h_c),
        terms_reduced=len(reduced.h_c_reduced),
        noncontextual_assignment={"q": list(a.q), "r": list(a.r)},
        stabilizers=[[p.label, v] for p, v in spec.stabilizers],
        groups=groups,
        e_nc=e_nc,
        e_c=e_c,
        e_csvqe=e_csvqe,
        reference_energy=ref,
        reference_source=prep.reference_source,
        error=abs(e_csvqe - ref) if ref is not None else None,
        accuracy=accuracy_of(e_csvqe, ref) if ref else None,
        ansatz="oracle" if options.oracle else options.ansatz,
        duration_dt=vqe.duration_dt,
        evaluations=vqe.evaluations,
        trace=[[i, e] for i, e in vqe.trace],
    )
    return PipelineResult(e_nc, e_c, e_csvqe, report, vqe)


def run_pipeline(instance: ProblemInstance, options: PipelineOptions = PipelineOptions()) -> PipelineResult:
    prep = prepare(instance, options)
    n_target = prep.n if options.n_target is None else options.n_target
    if not prep.min_qubits <= n_target <= prep.n:
        raise StageError("project", InfeasibleTargetError(
            f"n_target {n_target} outside the reachable range {prep.min_qubits}..{prep.n}"))
    return solve_at(prep, n_target, options)


def run_sweep(instance: ProblemInstance, options: PipelineOptions = PipelineOptions(),
              targets: Sequence[int] | None = None) -> list[PipelineResult]:
    """One result per target qubit count, from the fewest reachable to the full tapered size."""
    prep = prepare(instance, options)
    if targets is None:
        targets = range(prep.min_qubits, prep.n + 1)
    return [solve_at(prep, t, options) for t in targets]
