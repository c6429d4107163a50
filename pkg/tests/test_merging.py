import numpy as np
import pytest

from arealaw.entropies import region_entropy
from arealaw.errors import NotDivisible, RankTooLarge, ZeroProbabilityOutcome
from arealaw.merging import (apply_merging, choose_num_outcomes, copies_state, distillation_rate,
                             entangled_fraction, haar_unitary, merging_experiment,
                             mutual_information_AB, outcome_probabilities,
                             random_measurement_ensemble)
from arealaw.qcore import PureState
from arealaw.states import haar_random_tripartite


def phi_ac_zero_b():
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = amps[0b101] = 1 / np.sqrt(2)
    return PureState.chain(amps)


def test_haar_unitary_is_unitary_and_seeded():
    u = haar_unitary(6, 3)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(6), atol=1e-12)
    np.testing.assert_array_equal(u, haar_unitary(6, 3))


def test_haar_first_moment():
    d = 4
    m = np.mean([np.abs(haar_unitary(d, s)) ** 2 for s in range(2000)], axis=0)
    np.testing.assert_allclose(m, np.full((d, d), 1 / d), atol=0.02)


def test_ensemble_is_complete_projective_measurement():
    ens = random_measurement_ensemble(8, 4, seed=1)
    total = sum(ens.projectors)
    np.testing.assert_allclose(total, np.eye(8), atol=1e-12)
    for p in ens.projectors:
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
    assert ens.rank == 2
    with pytest.raises(NotDivisible):
        random_measurement_ensemble(8, 3)


def test_probabilities_sum_to_one():
    s = haar_random_tripartite(3, 2, 3, seed=0)
    ens = random_measurement_ensemble(8, 4, seed=0)
    assert outcome_probabilities(s, (3, 2, 3), ens).sum() == pytest.approx(1.0)


def test_perfect_merge_when_b_is_uncorrelated():
    s = phi_ac_zero_b()
    ens = random_measurement_ensemble(2, 1, seed=0)
    out = apply_merging(s, (1, 1, 1), ens, 0)
    assert out.decoupling_error <= 1e-9
    assert out.entangled_fraction >= 1 - 1e-9
    assert out.ebits_available == pytest.approx(1.0)
    assert distillation_rate(s, (1, 1, 1)) == pytest.approx(1.0)


def test_zero_probability_outcome_raises():
    amps = np.zeros(8, dtype=complex)
    amps[0] = 1
    s = PureState.chain(amps)
    # the identity unitary's second column is orthogonal to |0>_A
    from arealaw.merging import MeasurementEnsemble
    ens = MeasurementEnsemble(2, 2, (np.eye(2)[:, :1], np.eye(2)[:, 1:]))
    with pytest.raises(ZeroProbabilityOutcome):
        apply_merging(s, (1, 1, 1), ens, 1)


def test_entangled_fraction_closed_form():
    bell = PureState.chain(np.array([1, 0, 0, 1]) / np.sqrt(2))
    assert entangled_fraction(bell, 2) == pytest.approx(1.0)
    prod_ = PureState.chain(np.array([1, 0, 0, 0]))
    assert entangled_fraction(prod_, 2) == pytest.approx(0.5)
    with pytest.raises(RankTooLarge):
        entangled_fraction(bell, 3)


def test_entangled_fraction_brute_force():
    # overlap with (U (x) V)|Phi_r>, maximised over random local unitaries, never beats the formula
    rng = np.random.default_rng(0)
    v = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    psi = PureState((v / np.linalg.norm(v)), (3, 3))
    f = entangled_fraction(psi, 2)
    phi = np.zeros((3, 3))
    phi[0, 0] = phi[1, 1] = 1 / np.sqrt(2)
    best = 0.0
    for s in range(300):
        u, w = haar_unitary(3, 2 * s), haar_unitary(3, 2 * s + 1)
        cand = (u @ phi @ w.T).reshape(-1)
        best = max(best, abs(np.vdot(cand, psi.amplitudes)) ** 2)
    assert best <= f + 1e-12
    # the Schmidt-aligned candidate attains the value
    u, _, vh = np.linalg.svd(psi.amplitudes.reshape(3, 3))
    cand = (u @ phi @ vh).reshape(-1)
    assert abs(np.vdot(cand, psi.amplitudes)) ** 2 == pytest.approx(f)


def test_copies_state_doubles_entropies():
    s = haar_random_tripartite(1, 2, 2, seed=4)
    big, split = copies_state(s, (1, 2, 2), 2)
    assert split == (2, 4, 4)
    assert region_entropy(big, [0, 1]) == pytest.approx(2 * region_entropy(s, [0]))
    assert mutual_information_AB(big, split) == pytest.approx(2 * mutual_information_AB(s, (1, 2, 2)))


def test_choose_num_outcomes():
    assert choose_num_outcomes(2.0, 1, 32) == 4
    assert choose_num_outcomes(0.4, 1, 32) == 1
    assert choose_num_outcomes(6.0, 1, 8) == 8


def test_experiment_is_deterministic():
    s = haar_random_tripartite(2, 1, 3, seed=1)
    a = merging_experiment(s, (2, 1, 3), 1, 10, seed=5)
    b = merging_experiment(s, (2, 1, 3), 1, 10, seed=5)
    assert a.summary() == b.summary()
    c = merging_experiment(s, (2, 1, 3), 1, 3, seed=5, mode="exhaustive")
    assert sum(c.weights) == pytest.approx(3.0)
