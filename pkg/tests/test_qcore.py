import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arealaw.errors import InvalidRegion, NotAState, RegionTooLarge
from arealaw.qcore import (DensityOperator, PureState, Region, density_from_pure, fidelity,
                           marginal_spectrum, maximally_mixed, partial_trace, psd_sqrt, purify,
                           reduced_density, reduced_density_sites, spectral_decomposition,
                           tensor_product, trace_distance, trace_norm)
from oracles import ptrace_loops, random_density, random_pure


def test_pure_state_rejects_unnormalised():
    with pytest.raises(NotAState):
        PureState.chain(np.ones(4))
    s = PureState.chain(np.ones(4), normalize=True)
    assert s.num_sites == 2 and s.local_dim == 2


def test_pure_state_is_read_only():
    s = PureState.chain([1, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_density_validation():
    with pytest.raises(NotAState):
        DensityOperator(np.diag([0.7, 0.7]), (2,))
    with pytest.raises(NotAState):
        DensityOperator(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(NotAState):
        DensityOperator(np.array([[0.5, 1], [0, 0.5]]), (2,))


def test_region_wraps_on_ring():
    assert Region(3, 3).sites(5, "ring") == [3, 4, 0]
    with pytest.raises(InvalidRegion):
        Region(3, 3).sites(5, "line")


@pytest.mark.parametrize("keep", [[0], [1], [2], [0, 2], [1, 2], [0, 1, 2]])
def test_partial_trace_matches_loops(keep):
    rng = np.random.default_rng(5)
    dims = (2, 3, 2)
    m = random_density(12, rng)
    got = partial_trace(DensityOperator(m, dims), keep).matrix
    np.testing.assert_allclose(got, ptrace_loops(m, dims, keep), atol=1e-13)


def test_reduced_density_matches_full_partial_trace():
    rng = np.random.default_rng(1)
    s = PureState.chain(random_pure(2 ** 6, rng))
    full = density_from_pure(s)
    for sites in ([0, 1], [2, 3, 4], [5]):
        a = reduced_density_sites(s, sites).matrix
        b = partial_trace(full, sites).matrix
        np.testing.assert_allclose(a, b, atol=1e-13)


def test_reduced_density_size_cap():
    s = PureState.chain(np.eye(2 ** 12)[0])
    with pytest.raises(RegionTooLarge):
        reduced_density(s, Region(0, 11))


def test_marginal_spectrum_any_size():
    rng = np.random.default_rng(2)
    s = PureState.chain(random_pure(2 ** 12, rng))
    a = marginal_spectrum(s, list(range(11)))
    b = marginal_spectrum(s, [11])
    np.testing.assert_allclose(a[:2], b, atol=1e-12)
    assert abs(a.sum() - 1) < 1e-12


def test_spectral_roundtrip_and_sqrt():
    rng = np.random.default_rng(3)
    m = random_density(6, rng)
    dec = spectral_decomposition(m)
    np.testing.assert_allclose(dec.reconstruct(), m, atol=1e-13)
    r = psd_sqrt(m)
    np.testing.assert_allclose(r @ r, m, atol=1e-12)


def test_trace_distance_and_fidelity_known_values():
    z0 = DensityOperator(np.diag([1.0, 0.0]), (2,))
    z1 = DensityOperator(np.diag([0.0, 1.0]), (2,))
    mix = maximally_mixed(2)
    assert trace_distance(z0, z1) == pytest.approx(1.0)
    assert trace_distance(z0, mix) == pytest.approx(0.5)
    assert fidelity(z0, z1) == pytest.approx(0.0, abs=1e-12)
    assert fidelity(z0, mix) == pytest.approx(np.sqrt(0.5))


def test_tensor_product_dims():
    r = tensor_product(maximally_mixed(2), maximally_mixed(3))
    assert r.dims == (2, 3)
    np.testing.assert_allclose(r.matrix, np.eye(6) / 6)


def test_purification_reproduces_state():
    rng = np.random.default_rng(4)
    rho = DensityOperator(random_density(4, rng, rank=3), (2, 2))
    psi = purify(rho)
    back = partial_trace(density_from_pure(psi), [0, 1]).matrix
    np.testing.assert_allclose(back, rho.matrix, atol=1e-12)
    assert psi.dims[-1] == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_trace_distance_properties(seed):
    rng = np.random.default_rng(seed)
    a = DensityOperator(random_density(4, rng), (2, 2))
    b = DensityOperator(random_density(4, rng), (2, 2))
    d = trace_distance(a, b)
    f = fidelity(a, b)
    assert 0 <= d <= 1 + 1e-12
    # Fuchs-van de Graaf
    assert 1 - f <= d + 1e-10
    assert d <= np.sqrt(max(0.0, 1 - f * f)) + 1e-10
    assert trace_norm(a.matrix) == pytest.approx(1.0)
