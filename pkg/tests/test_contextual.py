import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cspulse.contextual import (
    ValueAssignment, decompose, is_noncontextual, objective, optimize_noncontextual, split,
)
from cspulse.errors import DimensionError, EnumerationLimitError, PreconditionError
from cspulse.pauli import PauliString, PauliSum, exact_ground, multiply

from conftest import FIXTURE_NAMES, kron_matrix


def strings(*labels):
    return [PauliString.from_label(s) for s in labels]


def random_sum(n, terms):
    return PauliSum.from_labels(terms, n=n)


sum_strategy = st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(st.text("IXYZ", min_size=n, max_size=n), st.floats(-2, 2, allow_nan=False).filter(lambda c: abs(c) > 1e-3)),
    min_size=1, max_size=10))


def test_small_sets():
    assert is_noncontextual(strings("IZ", "XI"))
    assert not is_noncontextual(strings("IZ", "XI", "IX", "ZI"))
    assert is_noncontextual(strings("X", "Y", "Z"))
    assert is_noncontextual(strings("ZZ", "ZI", "IZ"))


def test_inference_paths_disagree_in_sign():
    iz, xi, ix, zi = strings("IZ", "XI", "IX", "ZI")
    ph1, zz = multiply(zi, iz)
    ph2, xx = multiply(xi, ix)
    ph3, yy_a = multiply(zz, xx)
    path_a = ph1 * ph2 * ph3
    ph4, zx = multiply(zi, ix)
    ph5, xz = multiply(xi, iz)
    ph6, yy_b = multiply(zx, xz)
    path_b = ph4 * ph5 * ph6
    assert zz.label == "ZZ" and ph1.value == 1
    assert yy_a == yy_b == PauliString.from_label("YY")
    # YY = -(ZZ)(XX) and YY = +(ZX)(XZ): v_YY inferred with opposite signs
    assert path_a.value == -path_b.value
    assert np.allclose(kron_matrix("ZZ") @ kron_matrix("XX"), -kron_matrix("YY"))
    assert np.allclose(kron_matrix("ZX") @ kron_matrix("XZ"), kron_matrix("YY"))


@given(sum_strategy)
def test_split_partitions_and_is_noncontextual(terms):
    h = PauliSum.from_labels(terms)
    if len(h) == 0:
        return
    for strategy in ("greedy", "diagonal"):
        sp = split(h, strategy)
        assert sp.h_nc + sp.h_c == h
        assert set(sp.h_nc.terms).isdisjoint(sp.h_c.terms)
        assert is_noncontextual(sp.h_nc)


def test_split_rejects_empty_and_unknown():
    with pytest.raises(PreconditionError):
        split(PauliSum([], n=2))
    with pytest.raises(ValueError):
        split(PauliSum.from_labels({"Z": 1.0}), "bogus")


@given(sum_strategy)
@settings(max_examples=80)
def test_reconstruction_multiplies_back(terms):
    h = PauliSum.from_labels(terms)
    if len(h) == 0:
        return
    st_ = decompose(list(split(h).h_nc))
    for p in st_.reconstruction:
        phase, prod = st_.rebuild(p)
        assert prod == p and phase.value == 1
    for i, a in enumerate(st_.representatives):
        for b in st_.representatives[i + 1:]:
            assert not np.allclose(kron_matrix(a.label) @ kron_matrix(b.label),
                                   kron_matrix(b.label) @ kron_matrix(a.label))


@given(sum_strategy)
@settings(max_examples=80)
def test_classical_optimum_equals_true_ground_of_noncontextual_part(terms):
    h = PauliSum.from_labels(terms)
    if len(h) == 0:
        return
    h_nc = split(h).h_nc
    sol = optimize_noncontextual(decompose(list(h_nc)), h_nc)
    assert sol.energy == pytest.approx(exact_ground(h_nc)[0], abs=1e-9)


@pytest.mark.parametrize("a,b", [(0.3, -0.4), (1.0, 0.0), (-2.0, 1.5)])
def test_two_anticommuting_terms(a, b):
    h = PauliSum.from_labels({"X": a, "Z": b})
    sol = optimize_noncontextual(decompose(list(h)), h)
    assert abs(sol.energy + math.hypot(a, b)) < 1e-10


def test_objective_and_assignment_checks():
    h = PauliSum.from_labels({"ZI": 1.0, "IZ": 0.5, "ZZ": 0.2})
    st_ = decompose(list(h))
    assert len(st_.generators) == 2 and st_.n_classes == 0
    with pytest.raises(DimensionError):
        objective(st_, h, ValueAssignment((1,), ()))
    with pytest.raises(ValueError):
        ValueAssignment((2,), ())
    with pytest.raises(ValueError):
        ValueAssignment((), (0.5, 0.5))
    with pytest.raises(PreconditionError):
        decompose(strings("IZ", "XI", "IX", "ZI"))


def test_enumeration_limit_and_annealing():
    labels = ["ZIIII", "IZIII", "IIZII", "IIIZI", "IIIIZ", "ZZIII"]
    h = PauliSum.from_labels({s: -(i + 1) * 0.1 for i, s in enumerate(labels)})
    st_ = decompose(list(h))
    with pytest.raises(EnumerationLimitError):
        optimize_noncontextual(st_, h, limit=3)
    annealed = optimize_noncontextual(st_, h, limit=3, allow_annealing=True, seed=1)
    assert annealed.energy == pytest.approx(optimize_noncontextual(st_, h).energy)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_noncontextual_energy_is_exact(instances, name):
    h_nc = split(instances[name].hamiltonian).h_nc
    sol = optimize_noncontextual(decompose(list(h_nc)), h_nc)
    assert sol.energy == pytest.approx(exact_ground(h_nc)[0], abs=1e-9)
    assert sol.energy == pytest.approx(objective(decompose(list(h_nc)), h_nc, sol.assignment), abs=1e-12)
