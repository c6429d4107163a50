import numpy as np
import pytest

from arealaw.entropies import region_entropy
from arealaw.errors import TooLarge
from arealaw.qcore import reduced_density_sites
from arealaw.states import (HamiltonianSpec, dense_hamiltonian, entangled_pair_chain, ghz,
                            ground_state, haar_random_tripartite, lanczos_lowest)
from oracles import tfim_dense, tfim_sparse_ground, xy_dense


def test_pair_chain():
    s = entangled_pair_chain(3)
    assert region_entropy(s, [0, 1]) == pytest.approx(0.0, abs=1e-12)
    assert region_entropy(s, [1, 2]) == pytest.approx(2.0)
    with pytest.raises(TooLarge):
        entangled_pair_chain(9)


def test_ghz():
    s = ghz(7)
    np.testing.assert_allclose(reduced_density_sites(s, [3]).matrix, np.eye(2) / 2)
    assert region_entropy(s, [0, 1, 2]) == pytest.approx(1.0)
    with pytest.raises(TooLarge):
        ghz(17)


def test_haar_tripartite():
    s = haar_random_tripartite(1, 14, 1, seed=0)
    assert s.partition == (1, 14, 1)
    assert region_entropy(s, [0]) <= 1.0
    a = haar_random_tripartite(2, 2, 2, seed=9)
    b = haar_random_tripartite(2, 2, 2, seed=9)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)


def test_dense_hamiltonian_matches_oracle():
    spec = HamiltonianSpec("tfim", 5, h=0.3, boundary="ring")
    np.testing.assert_allclose(dense_hamiltonian(spec), tfim_dense(5, 0.3, ring=True).real)


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0])
def test_tfim_ground_energy_dense(h):
    res = ground_state(HamiltonianSpec("tfim", 8, h=h))
    w = np.linalg.eigvalsh(tfim_dense(8, h))
    assert res.energy == pytest.approx(w[0], abs=1e-8)
    assert res.gap_estimate == pytest.approx(w[1] - w[0], abs=1e-7)
    assert res.residual_norm <= 1e-8


def test_tfim_against_arpack_at_twelve_sites():
    res = ground_state(HamiltonianSpec("tfim", 12, h=1.0))
    w, v = tfim_sparse_ground(12, 1.0)
    assert res.energy == pytest.approx(w[0], abs=1e-8)
    assert abs(np.vdot(v, res.state.amplitudes)) == pytest.approx(1.0, abs=1e-8)


def test_large_field_is_nearly_product():
    res = ground_state(HamiltonianSpec("tfim", 8, h=8.0))
    assert region_entropy(res.state, list(range(4))) <= 0.05


def test_two_site_zero_field():
    res = ground_state(HamiltonianSpec("tfim", 2, h=0.0))
    assert res.energy == pytest.approx(-1.0)
    a = res.state.amplitudes
    assert abs(a[1]) < 1e-10 and abs(a[2]) < 1e-10
    assert res.degenerate


def test_xy_disorder_and_uniform_limit():
    uni = HamiltonianSpec("xy_random", 8, disorder_strength=0.0, seed=1)
    assert np.all(uni.couplings() == 1.0)
    res = ground_state(uni)
    assert res.energy == pytest.approx(np.linalg.eigvalsh(xy_dense(8, np.ones(7)))[0], abs=1e-8)
    dis = HamiltonianSpec("xy_random", 8, disorder_strength=0.5, seed=4)
    J = dis.couplings()
    assert np.all((J >= 0.5) & (J <= 1.5))
    res = ground_state(dis)
    assert res.energy == pytest.approx(np.linalg.eigvalsh(xy_dense(8, J))[0], abs=1e-8)
    np.testing.assert_array_equal(J, HamiltonianSpec("xy_random", 8, disorder_strength=0.5, seed=4).couplings())


def test_energy_nonincreasing_in_length():
    energies = [ground_state(HamiltonianSpec("tfim", n, h=1.5)).energy for n in range(4, 15, 2)]
    assert all(b <= a for a, b in zip(energies, energies[1:]))


def test_lanczos_on_diagonal_operator():
    d = np.arange(50, dtype=float)
    e, x, r, _, _ = lanczos_lowest(lambda v: d * v, 50, seed=0)
    assert e == pytest.approx(0.0, abs=1e-10)
    assert abs(x[0]) == pytest.approx(1.0)


def test_spec_validation():
    with pytest.raises(ValueError):
        HamiltonianSpec("heisenberg", 4)
    with pytest.raises(TooLarge):
        HamiltonianSpec("tfim", 17)
    with pytest.raises(ValueError):
        HamiltonianSpec("tfim", 4, h=float("nan"))
