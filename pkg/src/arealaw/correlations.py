"""Operator-norm correlation measure and correlation-length fits.

``Cor(X:Y) = max |tr((M (x) N) Delta)|`` over contractions M, N, with
``Delta = rho_XY - rho_X (x) rho_Y``. The maximisation is bilinear and
nonconvex, so :func:`cor_estimate` returns a certified interval: the
see-saw value of explicit witnesses below, and Hoelder's ``||Delta||_1``
above.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import prod
from typing import Sequence

import numpy as np

from .errors import DimMismatch, DoesNotFit, InsufficientPoints, NonDecayingProfile, NotQubits, RegionTooLarge
from .qcore import MAX_DENSITY_SITES, DensityOperator, PureState, reduced_density_sites, trace_norm

DEFAULT_RESTARTS = 32
DEFAULT_TOL = 1e-9
MAX_SEESAW_ITER = 1000
FIT_FLOOR = 1e-12

PAULIS = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class CorrelationEstimate:
    lower_bound: float
    upper_bound: float
    witness_M: np.ndarray = field(repr=False)
    witness_N: np.ndarray = field(repr=False)
    restarts_used: int
    converged: bool
    pauli_value: float | None = None


@dataclass(frozen=True)
class DecayFit:
    xi: float
    intercept: float
    residual: float
    points: list


def split_dims(rho: DensityOperator, split: int | None) -> tuple:
    """Return (dX, dY) for a bipartition after the first ``split`` subsystems."""
    if split is None:
        if len(rho.dims) != 2:
            raise DimMismatch(f"need an explicit split for dims {rho.dims}")
        split = 1
    if not 0 < split < len(rho.dims):
        raise DimMismatch(f"split {split} invalid for dims {rho.dims}")
    return prod(rho.dims[:split]), prod(rho.dims[split:])


def correlation_delta(rho: DensityOperator, split: int | None = None) -> np.ndarray:
    """``rho_XY - rho_X (x) rho_Y`` as a 4-index tensor ``[x, y, x', y']``."""
    dx, dy = split_dims(rho, split)
    t = rho.matrix.reshape(dx, dy, dx, dy)
    rx = np.einsum("abcb->ac", t)
    ry = np.einsum("abad->bd", t)
    return t - np.einsum("ac,bd->abcd", rx, ry)


def _bilinear(delta, m, n):
    return np.einsum("abcd,ca,db->", delta, m, n)


def _polar_dual(k: np.ndarray):
    """Contraction maximising |tr(M K)| and the attained value ||K||_1."""
    u, s, vh = np.linalg.svd(k)
    return vh.conj().T @ u.conj().T, float(s.sum())


def _seesaw(delta, n0, tol, max_iter):
    dx, dy = delta.shape[0], delta.shape[1]
    # flattened contractions: K[a,c] = sum Delta[a,b,c,d] N[d,b], L[b,d] = sum Delta[a,b,c,d] M[c,a]
    to_k = delta.transpose(0, 2, 3, 1).reshape(dx * dx, dy * dy)
    to_l = delta.transpose(1, 3, 2, 0).reshape(dy * dy, dx * dx)
    n = n0
    history = []
    m = None
    for _ in range(max_iter):
        m, val_m = _polar_dual((to_k @ n.reshape(-1)).reshape(dx, dx))
        history.append(val_m)
        n, val_n = _polar_dual((to_l @ m.reshape(-1)).reshape(dy, dy))
        history.append(val_n)
        if len(history) >= 3 and history[-1] - history[-3] < tol:
            break
    else:
        return m, n, history, False
    return m, n, history, True


def _assert_monotone(history):
    h = np.asarray(history)
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    if h.size > 1 and np.min(np.diff(h)) < -1e-10 * scale:
        raise AssertionError("see-saw objective decreased")


def cor_estimate(rho_XY: DensityOperator, restarts: int = DEFAULT_RESTARTS,
                 tol: float = DEFAULT_TOL, seed=0, split: int | None = None,
                 max_iter: int = MAX_SEESAW_ITER) -> CorrelationEstimate:
    """Certified interval for Cor(X:Y).

    Starts the alternating maximisation from the best product-Pauli pair
    (when every factor is a qubit) and from ``restarts`` Haar-random
    unitaries for N.
    """
    from .merging import haar_unitary

    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    dx, dy = split_dims(rho_XY, split)
    delta = correlation_delta(rho_XY, split)
    upper = trace_norm(delta.reshape(dx * dy, dx * dy))

    if upper < 1e-14:
        eye_x, eye_y = np.eye(dx, dtype=complex), np.eye(dy, dtype=complex)
        return CorrelationEstimate(0.0, upper, eye_x, eye_y, 0, True, 0.0 if _all_qubits(rho_XY) else None)

    starts = []
    pauli_val = None
    if _all_qubits(rho_XY):
        nx = int(np.log2(dx))
        pauli_val, (p_x, p_y) = _pauli_best(delta.reshape(dx * dy, dx * dy), nx, int(np.log2(dy)))
        starts.append(_pauli_string(p_y))
    children = seed_sequence(seed).spawn(restarts)
    starts.extend(haar_unitary(dy, np.random.default_rng(c)) for c in children)

    best = None
    for n0 in starts:
        m, n, hist, ok = _seesaw(delta, n0, tol, max_iter)
        _assert_monotone(hist)
        val = abs(_bilinear(delta, m, n))
        if best is None or val > best[0]:
            best = (val, m, n, ok)

    val, m, n, ok = best
    lower = float(min(val, upper))
    return CorrelationEstimate(lower, upper, m, n, len(starts), ok, pauli_val)


def seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _all_qubits(rho: DensityOperator) -> bool:
    return all(d == 2 for d in rho.dims)


def _pauli_string(labels) -> np.ndarray:
    return reduce(np.kron, [PAULIS[p] for p in labels], np.ones((1, 1), dtype=complex))


def pauli_coefficients(op: np.ndarray, num_qubits: int) -> np.ndarray:
    """``c[p_1, ..., p_n] = tr((sigma_{p_1} (x) ... (x) sigma_{p_n}) op)``."""
    n = num_qubits
    t = op.reshape((2,) * (2 * n))
    axes = [ax for k in range(n) for ax in (k, n + k)]
    t = np.transpose(t, axes).reshape((4,) * n)
    # tr(P A) = sum_ij P[j, i] A[i, j]; rows of w are vec(P^T)
    w = np.stack([p.T.reshape(-1) for p in PAULIS])
    for k in range(n):
        t = np.tensordot(w, t, axes=([1], [k]))
        t = np.moveaxis(t, 0, k)
    return t


def _pauli_best(delta_mat, nx, ny):
    c = np.abs(pauli_coefficients(delta_mat, nx + ny))
    c.reshape(-1)[0] = 0.0
    idx = np.unravel_index(int(np.argmax(c)), c.shape)
    return float(c[idx]), (idx[:nx], idx[nx:])


def pauli_witness(rho_XY: DensityOperator, split: int | None = None) -> float:
    """Largest |tr((P (x) Q) Delta)| over Pauli strings P on X and Q on Y."""
    if not _all_qubits(rho_XY):
        raise NotQubits(f"dims {rho_XY.dims} are not all qubits")
    dx, dy = split_dims(rho_XY, split)
    delta = correlation_delta(rho_XY, split).reshape(dx * dy, dx * dy)
    return _pauli_best(delta, int(np.log2(dx)), int(np.log2(dy)))[0]


# --------------------------------------------------------------------------
# decay profiles

def block_sites(num_sites: int, boundary: str, x_size: int, y_size: int, l: int):
    """Sites of X (leftmost ``x_size``) and Y (``y_size`` sites, ``l`` sites after X).

    Returns ``(x_sites, y_sites, separation)``; on a ring the separation is
    the shorter of the two arcs between the blocks.
    """
    if l < 0 or x_size < 1 or y_size < 1:
        raise DoesNotFit("sizes must be positive and separation non-negative")
    end = x_size + l + y_size
    if end > num_sites:
        raise DoesNotFit(f"X({x_size}) + l({l}) + Y({y_size}) exceeds {num_sites} sites")
    xs = list(range(x_size))
    ys = list(range(x_size + l, end))
    sep = l if boundary == "line" else min(l, num_sites - end)
    return xs, ys, sep


def decay_profile(state: PureState, x_size: int, y_size: int, separations: Sequence[int],
                  restarts: int = DEFAULT_RESTARTS, tol: float = DEFAULT_TOL, seed=0,
                  map_fn=map) -> list:
    """One :class:`CorrelationEstimate` per separation, as ``(l, estimate)`` pairs.

    ``map_fn`` lets callers fan separations out over a worker pool; each
    separation receives its own child seed, so ordering does not matter.
    """
    if x_size + y_size > MAX_DENSITY_SITES:
        raise RegionTooLarge(f"x_size + y_size = {x_size + y_size} > {MAX_DENSITY_SITES}")
    geoms = [block_sites(state.num_sites, state.boundary, x_size, y_size, l) for l in separations]
    children = seed_sequence(seed).spawn(len(geoms))

    def one(args):
        (xs, ys, sep), child = args
        rho = reduced_density_sites(state, xs + ys)
        est = cor_estimate(rho, restarts=restarts, tol=tol, seed=child, split=len(xs))
        return sep, est

    return list(map_fn(one, list(zip(geoms, children))))


def fit_correlation_length(profile, floor: float = FIT_FLOOR) -> DecayFit:
    """Least-squares fit of ``log2 cor = -l / xi + b``.

    ``profile`` holds ``(l, value)`` pairs where value is either a float or a
    :class:`CorrelationEstimate` (its lower bound is used).
    """
    pts = []
    for l, v in profile:
        c = v.lower_bound if isinstance(v, CorrelationEstimate) else float(v)
        pts.append((int(l), c))
    used = [(l, c) for l, c in pts if c > floor]
    if len(used) < 3:
        raise InsufficientPoints(f"only {len(used)} points above {floor:g}")
    ls = np.array([p[0] for p in used], dtype=float)
    ys = np.log2([p[1] for p in used])
    slope, intercept = np.polyfit(ls, ys, 1)
    if not slope < 0:
        raise NonDecayingProfile(f"fitted slope {slope:.4g} is not negative")
    resid = ys - (slope * ls + intercept)
    return DecayFit(float(-1.0 / slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))), pts)
