"""Hot loops for matrix-free spin-chain Hamiltonians.

Basis states are integers whose most significant bit is site 0. Each kernel
exists twice: a numba loop (``*_numba``) and a vectorised numpy version
(``*_numpy``). The public names dispatch on ``_accel.USE_NUMBA``.

A Hamiltonian is encoded as

* ``diag``: length-2^n diagonal (Z-type terms),
* ``flip_masks, flip_coeffs``: terms c * X_S with X_S flipping the bits in mask,
* ``hop_masks, hop_coeffs``: two-bit masks applied only when the two bits
  differ, i.e. c * (X_i X_j + Y_i Y_j) / 2.
"""
import numpy as np

from ._accel import USE_NUMBA, njit


def site_mask(n, site):
    return 1 << (n - 1 - site)


def _bond_diagonal_numpy(n, left, right, coeffs):
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n)
    for a, b, c in zip(left, right, coeffs):
        za = 1 - 2 * ((idx >> (n - 1 - a)) & 1)
        zb = 1 - 2 * ((idx >> (n - 1 - b)) & 1)
        out += c * za * zb
    return out


@njit(cache=True)
def _bond_diagonal_numba(n, left, right, coeffs):
    dim = 1 << n
    out = np.zeros(dim)
    for s in range(dim):
        acc = 0.0
        for k in range(left.shape[0]):
            za = 1 - 2 * ((s >> (n - 1 - left[k])) & 1)
            zb = 1 - 2 * ((s >> (n - 1 - right[k])) & 1)
            acc += coeffs[k] * za * zb
        out[s] = acc
    return out


def _spin_matvec_numpy(v, diag, flip_masks, flip_coeffs, hop_masks, hop_coeffs):
    idx = np.arange(v.shape[0], dtype=np.int64)
    out = diag * v
    for m, c in zip(flip_masks, flip_coeffs):
        out += c * v[idx ^ m]
    for m, c in zip(hop_masks, hop_coeffs):
        hit = idx & m
        active = (hit != 0) & (hit != m)
        out += np.where(active, c * v[idx ^ m], 0.0)
    return out


@njit(cache=True)
def _spin_matvec_numba(v, diag, flip_masks, flip_coeffs, hop_masks, hop_coeffs):
    dim = v.shape[0]
    out = np.empty_like(v)
    for s in range(dim):
        acc = diag[s] * v[s]
        for k in range(flip_masks.shape[0]):
            acc += flip_coeffs[k] * v[s ^ flip_masks[k]]
        for k in range(hop_masks.shape[0]):
            m = hop_masks[k]
            hit = s & m
            if hit != 0 and hit != m:
                acc += hop_coeffs[k] * v[s ^ m]
        out[s] = acc
    return out


def _as_args(left, right, coeffs):
    return (np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64),
            np.asarray(coeffs, dtype=np.float64))


def bond_diagonal(n, left, right, coeffs, *, use_numba=None):
    """Diagonal of sum_k coeffs[k] Z_{left[k]} Z_{right[k]}."""
    use_numba = USE_NUMBA if use_numba is None else use_numba
    args = _as_args(left, right, coeffs)
    if use_numba:
        return _bond_diagonal_numba(n, *args)
    return _bond_diagonal_numpy(n, *args)


def spin_matvec(v, diag, flip_masks, flip_coeffs, hop_masks, hop_coeffs, *, use_numba=None):
    use_numba = USE_NUMBA if use_numba is None else use_numba
    fm = np.asarray(flip_masks, dtype=np.int64)
    fc = np.asarray(flip_coeffs, dtype=np.float64)
    hm = np.asarray(hop_masks, dtype=np.int64)
    hc = np.asarray(hop_coeffs, dtype=np.float64)
    if use_numba:
        return _spin_matvec_numba(v, diag, fm, fc, hm, hc)
    return _spin_matvec_numpy(v, diag, fm, fc, hm, hc)
