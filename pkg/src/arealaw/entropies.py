"""Von Neumann and single-shot entropies, in bits.

The conditional min-entropy is computed from the SDP

    minimise tr(s)  subject to  I_A (x) s >= rho_AB,

whose optimum is ``2^{-H_min(A|B)}``. A log-det barrier method follows the
central path; at a central point ``X = S^{-1} / t`` (``S = I (x) s - rho``)
is dual feasible for ``max tr(rho X), X >= 0, tr_A X <= I_B``, and the
duality gap is ``dim / t``. Both witnesses are repaired to exact
feasibility before the gap is reported.

Smoothing is approximated by spectral truncation only, see
:func:`spectral_truncation`; smoothed outputs are surrogates, not ball
optima.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import DimMismatch, DimTooLarge, NotAState, SolverDidNotConverge
from .qcore import (RANK_CUTOFF, DensityOperator, PureState, marginal_spectrum,
                    partial_trace, purify, reduced_density_sites)

ENTROPY_FLOOR = 1e-14
MAX_HMIN_DIM = 256
# Newton systems are db^2 x db^2; beyond this the solve takes minutes.
MAX_HMIN_COND_DIM = 32
DEFAULT_HMIN_TOL = 1e-7
SURROGATE_LABEL = "truncation surrogate"


def entropy_of_spectrum(w) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > ENTROPY_FLOOR]
    return float(-(w * np.log2(w)).sum())


def von_neumann(rho: DensityOperator) -> float:
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix))


def region_entropy(state: PureState, sites) -> float:
    """H of the marginal on ``sites`` of a pure state (no size cap)."""
    return entropy_of_spectrum(marginal_spectrum(state, sites))


def _split(rho: DensityOperator, split):
    if split is None:
        if len(rho.dims) != 2:
            raise DimMismatch(f"need an explicit split for dims {rho.dims}")
        split = 1
    if not 0 < split < len(rho.dims):
        raise DimMismatch(f"split {split} invalid for dims {rho.dims}")
    a = list(range(split))
    b = list(range(split, len(rho.dims)))
    return a, b


def conditional_von_neumann(rho_AC: DensityOperator, split: int | None = None) -> float:
    """H(A|C) = H(AC) - H(C)."""
    _, c = _split(rho_AC, split)
    return von_neumann(rho_AC) - von_neumann(partial_trace(rho_AC, c))


def mutual_information(rho_AB: DensityOperator, split: int | None = None) -> float:
    a, b = _split(rho_AB, split)
    return (von_neumann(partial_trace(rho_AB, a)) + von_neumann(partial_trace(rho_AB, b))
            - von_neumann(rho_AB))


# --------------------------------------------------------------------------
# min-entropy SDP

@dataclass(frozen=True)
class MinEntropyResult:
    value_bits: float
    sigma_witness: DensityOperator
    dual_witness: np.ndarray = field(repr=False)
    primal_dual_gap: float
    primal_value: float
    dual_value: float
    sigma_unnormalized: np.ndarray = field(repr=False, default=None)
    smoothing: str | None = None

    @property
    def bounds_bits(self) -> tuple:
        """Interval certified to contain the exact H_min."""
        return -np.log2(self.primal_value), -np.log2(self.dual_value)


@dataclass(frozen=True)
class SmoothingSpec:
    epsilon: float = 0.0
    method: str = "spectral_truncation"

    def __post_init__(self):
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        if self.method != "spectral_truncation":
            raise ValueError(f"unknown smoothing method {self.method!r}")


def partial_trace_first(m: np.ndarray, da: int, db: int) -> np.ndarray:
    """tr_A of a (da*db) x (da*db) matrix."""
    return np.einsum("aiaj->ij", m.reshape(da, db, da, db))


def _newton_matrix(T, da, db):
    """Matrix of D -> tr_A(T (I (x) D) T) acting on row-major vec(D)."""
    T4 = T.reshape(da, db, da, db)
    left = T4.transpose(1, 3, 0, 2).reshape(db * db, da * da)    # [(i,k), (a,b)]
    right = T4.transpose(2, 0, 1, 3).reshape(da * da, db * db)   # [(a,b), (l,j)]
    h = (left @ right).reshape(db, db, db, db)                   # [i, k, l, j]
    return h.transpose(0, 3, 1, 2).reshape(db * db, db * db)


def _barrier_newton(rho, da, db, t, sig, max_newton=60):
    """Centre ``t tr(s) - log det(I (x) s - rho)`` by damped Newton."""
    eye_a = np.eye(da)

    def objective(s):
        S = np.kron(eye_a, s) - rho
        try:
            L = np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            return np.inf, None
        return t * np.trace(s).real - 2.0 * np.log(np.abs(np.diag(L))).sum(), S

    f, S = objective(sig)
    for _ in range(max_newton):
        T = np.linalg.inv(S)
        T = 0.5 * (T + T.conj().T)
        grad = t * np.eye(db) - partial_trace_first(T, da, db)
        hess = _newton_matrix(T, da, db)
        step = np.linalg.solve(hess, -grad.reshape(-1)).reshape(db, db)
        step = 0.5 * (step + step.conj().T)
        decrement = float(np.real(-np.vdot(grad.conj().T.reshape(-1), step.reshape(-1))))
        if decrement < 1e-12:
            break
        alpha = 1.0
        while alpha > 1e-12:
            f_new, S_new = objective(sig + alpha * step)
            if f_new <= f - 0.25 * alpha * decrement:
                break
            alpha *= 0.5
        else:
            break
        sig = sig + alpha * step
        f, S = f_new, S_new
    return sig, S


def _solve_hmin_sdp(rho: np.ndarray, da: int, db: int, tol: float):
    dim = da * db
    lam = np.linalg.eigvalsh(rho)[-1]
    sig = (lam + 1.0) * np.eye(db, dtype=complex)
    t = 1.0
    t_final = dim / (0.01 * tol)
    S = np.kron(np.eye(da), sig) - rho
    while True:
        sig, S = _barrier_newton(rho, da, db, t, sig)
        if t >= t_final:
            break
        t = min(t * 8.0, t_final)
    w, v = np.linalg.eigh(S)
    X = (v / (t * w)) @ v.conj().T
    return sig, X


def _repair(rho, da, db, sig, X):
    """Shift/scale the raw witnesses until both are exactly feasible."""
    sig = 0.5 * (sig + sig.conj().T)
    w, v = np.linalg.eigh(sig)
    sig = (v * np.clip(w, 0.0, None)) @ v.conj().T
    slack = np.linalg.eigvalsh(np.kron(np.eye(da), sig) - rho)[0]
    if slack < 0:
        sig = sig + (-slack) * (1 + 1e-12) * np.eye(db)
    X = 0.5 * (X + X.conj().T)
    w, v = np.linalg.eigh(X)
    X = (v * np.clip(w, 0.0, None)) @ v.conj().T
    # congruence by (tr_A X)^{-1/2} restores tr_A X = I direction by direction
    w, v = np.linalg.eigh(partial_trace_first(X, da, db))
    if w[0] > 0:
        m = np.kron(np.eye(da), (v / np.sqrt(w)) @ v.conj().T)
        X = m @ X @ m.conj().T
        X = 0.5 * (X + X.conj().T)
    mu = np.linalg.eigvalsh(partial_trace_first(X, da, db))[-1]
    if mu > 1.0:
        X = X / mu
    return sig, X


def h_min(rho_AB: DensityOperator, tol: float = DEFAULT_HMIN_TOL,
          split: int | None = None) -> MinEntropyResult:
    """Conditional min-entropy H_min(A|B) with primal and dual certificates."""
    a, b = _split(rho_AB, split)
    da, db = prod(rho_AB.dims[i] for i in a), prod(rho_AB.dims[i] for i in b)
    if da * db > MAX_HMIN_DIM:
        raise DimTooLarge(f"dim(AB) = {da * db} > {MAX_HMIN_DIM}")
    if db > MAX_HMIN_COND_DIM:
        raise DimTooLarge(f"dim(B) = {db} > {MAX_HMIN_COND_DIM}")
    rho = rho_AB.matrix
    sig, X = _solve_hmin_sdp(rho, da, db, tol)
    sig, X = _repair(rho, da, db, sig, X)
    primal = float(np.trace(sig).real)
    dual = float(np.real(np.trace(rho @ X)))
    gap = max(0.0, primal - dual)
    if gap > tol or dual <= 0:
        raise SolverDidNotConverge(f"duality gap {gap:.3e} exceeds {tol:.1e}",
                                   lower=-np.log2(primal), upper=-np.log2(dual) if dual > 0 else np.inf)
    dims_b = tuple(rho_AB.dims[i] for i in b)
    return MinEntropyResult(
        value_bits=float(-np.log2(primal)),
        sigma_witness=DensityOperator(sig / primal, dims_b, validate=False),
        dual_witness=X,
        primal_dual_gap=gap,
        primal_value=primal,
        dual_value=dual,
        sigma_unnormalized=sig,
    )


# --------------------------------------------------------------------------
# smoothing surrogates

def spectral_truncation(rho: DensityOperator, epsilon: float) -> DensityOperator:
    """Drop the smallest eigenvalues of total weight <= epsilon and renormalise."""
    if epsilon <= 0:
        return rho
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    drop = np.cumsum(w) <= epsilon
    if drop.all():
        drop[-1] = False
    w = np.where(drop, 0.0, w)
    m = (v * w) @ v.conj().T
    return DensityOperator(m / w.sum(), rho.dims, validate=False)


def h_min_smoothed(rho_AB: DensityOperator, spec: SmoothingSpec = SmoothingSpec(),
                   tol: float = DEFAULT_HMIN_TOL, split: int | None = None) -> MinEntropyResult:
    if spec.epsilon == 0:
        return h_min(rho_AB, tol, split)
    res = h_min(spectral_truncation(rho_AB, spec.epsilon), tol, split)
    return MinEntropyResult(**{**res.__dict__, "smoothing": SURROGATE_LABEL})


def max_entropy_of_spectrum(w, epsilon: float = 0.0) -> float:
    w = np.sort(np.clip(np.asarray(w, dtype=float), 0.0, None))[::-1]
    if epsilon == 0:
        return float(np.log2(max(1, int((w > RANK_CUTOFF).sum()))))
    k = int(np.searchsorted(np.cumsum(w), 1.0 - epsilon - 1e-15) + 1)
    return float(np.log2(min(k, w.size)))


def h_max_marginal(rho: DensityOperator, spec: SmoothingSpec = SmoothingSpec()) -> float:
    """log2 rank (eps = 0) or log2 of the smallest top-k set holding 1 - eps of the weight."""
    return max_entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix), spec.epsilon)


def region_max_entropy(state: PureState, sites, spec: SmoothingSpec = SmoothingSpec()) -> float:
    return max_entropy_of_spectrum(marginal_spectrum(state, sites), spec.epsilon)


def h_max_conditional(rho_AC: DensityOperator, spec: SmoothingSpec = SmoothingSpec(),
                      tol: float = DEFAULT_HMIN_TOL, split: int | None = None,
                      purification: PureState | None = None) -> float:
    """H_max(A|C) = -H_min(A|B) for the eigen-purification |phi>_ACB of rho_AC.

    Any other purification may be supplied; its last subsystem plays B.
    """
    a, _ = _split(rho_AC, split)
    phi = purify(rho_AC) if purification is None else purification
    anc = phi.num_sites - 1
    rho_AB = reduced_density_sites(phi, a + [anc], max_sites=phi.num_sites)
    return -h_min_smoothed(rho_AB, spec, tol, split=len(a)).value_bits


def i_max(rho_AB: DensityOperator, spec: SmoothingSpec = SmoothingSpec(),
          tol: float = DEFAULT_HMIN_TOL, split: int | None = None) -> float:
    """I_max(A:B) = H_max(A) - H_min(A|B), both smoothed per ``spec``."""
    a, _ = _split(rho_AB, split)
    return (h_max_marginal(partial_trace(rho_AB, a), spec)
            - h_min_smoothed(rho_AB, spec, tol, split).value_bits)
