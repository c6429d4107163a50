import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arealaw.correlations import (PAULIS, block_sites, cor_estimate, correlation_delta,
                                  decay_profile, fit_correlation_length, pauli_coefficients,
                                  pauli_witness)
from arealaw.errors import DoesNotFit, InsufficientPoints, NonDecayingProfile, NotQubits
from arealaw.qcore import DensityOperator, PureState, tensor_product
from arealaw.states import entangled_pair_chain, ghz
from oracles import kron_all, random_density, trace_norm

BELL = np.zeros((4, 4))
BELL[0, 0] = BELL[0, 3] = BELL[3, 0] = BELL[3, 3] = 0.5


def test_bell_interval():
    est = cor_estimate(DensityOperator(BELL, (2, 2)))
    assert est.lower_bound == pytest.approx(1.0, abs=1e-6)
    assert est.upper_bound == pytest.approx(1.5, abs=1e-9)
    assert est.converged
    m, n = est.witness_M, est.witness_N
    assert np.linalg.norm(m, 2) <= 1 + 1e-9 and np.linalg.norm(n, 2) <= 1 + 1e-9


def test_classically_correlated_pair():
    rho = np.diag([0.5, 0, 0, 0.5])
    est = cor_estimate(DensityOperator(rho, (2, 2)))
    # Delta = (Z (x) Z) / 4, so the Z (x) Z witness and the trace norm both give 1
    assert est.lower_bound == pytest.approx(1.0, abs=1e-9)
    assert est.upper_bound == pytest.approx(1.0, abs=1e-12)
    assert pauli_witness(DensityOperator(rho, (2, 2))) == pytest.approx(1.0)


def test_product_state_is_zero():
    rng = np.random.default_rng(0)
    a = DensityOperator(random_density(2, rng), (2,))
    b = DensityOperator(random_density(3, rng), (3,))
    est = cor_estimate(tensor_product(a, b))
    assert est.upper_bound <= 1e-10 and est.lower_bound <= 1e-10


def test_delta_matches_explicit_construction():
    rng = np.random.default_rng(1)
    m = random_density(6, rng)
    rho = DensityOperator(m, (2, 3))
    t = m.reshape(2, 3, 2, 3)
    rx, ry = np.einsum("ijkj->ik", t), np.einsum("ijil->jl", t)
    np.testing.assert_allclose(correlation_delta(rho).reshape(6, 6), m - np.kron(rx, ry), atol=1e-14)


def test_pauli_coefficients_against_brute_force():
    rng = np.random.default_rng(2)
    m = random_density(8, rng)
    c = pauli_coefficients(m, 3)
    for idx in [(0, 0, 0), (1, 2, 3), (3, 3, 0), (2, 0, 1)]:
        p = kron_all([PAULIS[i] for i in idx])
        assert c[idx] == pytest.approx(np.trace(p @ m))


def test_pauli_witness_requires_qubits():
    with pytest.raises(NotQubits):
        pauli_witness(DensityOperator(np.eye(6) / 6, (2, 3)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_interval_is_ordered_and_contains_pauli(seed):
    rng = np.random.default_rng(seed)
    rho = DensityOperator(random_density(4, rng), (2, 2))
    est = cor_estimate(rho, restarts=4, seed=seed)
    assert est.lower_bound <= est.upper_bound + 1e-12
    assert est.pauli_value <= est.lower_bound + 1e-9
    assert est.upper_bound == pytest.approx(
        trace_norm(correlation_delta(rho).reshape(4, 4)), abs=1e-12)


def test_estimate_is_deterministic_under_seed():
    rng = np.random.default_rng(3)
    rho = DensityOperator(random_density(9, rng), (3, 3))
    a = cor_estimate(rho, restarts=5, seed=11)
    b = cor_estimate(rho, restarts=5, seed=11)
    assert a.lower_bound == b.lower_bound


def test_block_sites_geometry():
    assert block_sites(10, "line", 2, 1, 3) == ([0, 1], [5], 3)
    assert block_sites(10, "ring", 1, 1, 7)[2] == 1
    with pytest.raises(DoesNotFit):
        block_sites(6, "line", 2, 2, 3)


def test_pair_chain_has_no_long_range_correlation():
    prof = decay_profile(entangled_pair_chain(4), 1, 1, [1, 2, 3, 4], restarts=2)
    assert prof[0][1].lower_bound == pytest.approx(0.0, abs=1e-12)  # sites 0 and 2
    for _, est in prof[1:]:
        assert est.upper_bound <= 1e-12


def test_fit_recovers_exact_exponential():
    prof = [(l, 2.0 ** (-l / 1.7 + 0.3)) for l in range(1, 7)]
    fit = fit_correlation_length(prof)
    assert fit.xi == pytest.approx(1.7)
    assert fit.intercept == pytest.approx(0.3)
    assert fit.residual < 1e-10


def test_fit_errors():
    prof = decay_profile(ghz(6), 1, 1, [1, 2, 3], restarts=2)
    with pytest.raises(NonDecayingProfile):
        fit_correlation_length(prof)
    with pytest.raises(InsufficientPoints):
        fit_correlation_length(prof[:2])
