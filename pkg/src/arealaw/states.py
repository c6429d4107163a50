"""State generators: entangled-pair chains, GHZ, Haar-random states, random
MPS and spin-chain ground states.

Ground states come from a matrix-free Lanczos solver with full
reorthogonalisation and explicit restarts. The Hamiltonian is applied by
:mod:`arealaw.kernels`, so memory stays at a few Krylov vectors of length 2^n.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import kernels
from .errors import NoConvergence, TooLarge
from .merging import haar_unitary
from .mps import MPSState
from .qcore import MAX_PURE_SITES, PureState

MODELS = ("tfim", "xy_random")
LANCZOS_TOL = 1e-10
MAX_RESIDUAL = 1e-8
MAX_LANCZOS_ITER = 2000
KRYLOV_DIM = 150
DEGENERACY_GAP = 1e-8
DISORDER_LAW = "uniform[1-w, 1+w]"

_BELL = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def entangled_pair_chain(n_pairs: int) -> PureState:
    """Bell pairs on sites (2i, 2i+1)."""
    if not 1 <= n_pairs <= 8:
        raise TooLarge(f"n_pairs must lie in 1..8, got {n_pairs}")
    amps = reduce(np.kron, [_BELL] * n_pairs)
    return PureState.chain(amps, 2 * n_pairs)


def ghz(n: int) -> PureState:
    if not 2 <= n <= MAX_PURE_SITES:
        raise TooLarge(f"ghz needs 2 <= n <= {MAX_PURE_SITES}, got {n}")
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState.chain(amps, n)


def product_state(n: int, local=None) -> PureState:
    """|0...0> by default, or the tensor power of ``local``."""
    if not 1 <= n <= MAX_PURE_SITES:
        raise TooLarge(f"product state needs 1 <= n <= {MAX_PURE_SITES}")
    v = np.array([1, 0], dtype=complex) if local is None else np.asarray(local, dtype=complex)
    v = v / np.linalg.norm(v)
    return PureState.chain(reduce(np.kron, [v] * n), n, local_dim=v.size)


def haar_random_state(n: int, seed=None, local_dim: int = 2) -> PureState:
    if n > MAX_PURE_SITES:
        raise TooLarge(f"{n} sites exceeds {MAX_PURE_SITES}")
    rng = np.random.default_rng(seed)
    dim = local_dim ** n
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState.chain(z, n, local_dim, normalize=True)


def haar_random_tripartite(nA: int, nB: int, nC: int, seed=None) -> PureState:
    """Haar-random pure qubit state split contiguously into (A, B, C)."""
    n = nA + nB + nC
    if n > MAX_PURE_SITES:
        raise TooLarge(f"{n} sites exceeds {MAX_PURE_SITES}")
    s = haar_random_state(n, seed)
    return PureState(s.amplitudes, s.dims, partition=(nA, nB, nC))


def random_mps(n: int, D: int, seed=None, local_dim: int = 2) -> MPSState:
    """Left-canonical MPS built from columns of Haar unitaries."""
    if n > MAX_PURE_SITES or D > 32:
        raise TooLarge("random_mps needs n <= 16 and D <= 32")
    rng = np.random.default_rng(seed)
    tensors = []
    dl = 1
    for j in range(n):
        dr = min(D, local_dim ** (j + 1), local_dim ** (n - j - 1))
        u = haar_unitary(dl * local_dim, rng)
        tensors.append(u[:, :dr].reshape(dl, local_dim, dr))
        dl = dr
    return MPSState(tuple(tensors), "left")


@dataclass(frozen=True)
class HamiltonianSpec:
    model: str
    num_sites: int
    h: float = 0.0
    disorder_strength: float = 0.0
    seed: int | None = None
    boundary: str = "line"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if not 2 <= self.num_sites <= MAX_PURE_SITES:
            raise TooLarge(f"num_sites must lie in 2..{MAX_PURE_SITES}")
        if self.boundary not in ("line", "ring"):
            raise ValueError("boundary must be 'line' or 'ring'")
        if self.boundary == "ring" and self.num_sites < 3:
            raise ValueError("a ring needs at least 3 sites")
        if not (np.isfinite(self.h) and np.isfinite(self.disorder_strength)):
            raise ValueError("parameters must be finite")

    def bonds(self) -> list:
        n = self.num_sites
        out = [(i, i + 1) for i in range(n - 1)]
        if self.boundary == "ring":
            out.append((n - 1, 0))
        return out

    def couplings(self) -> np.ndarray:
        nb = len(self.bonds())
        if self.model == "tfim":
            return np.ones(nb)
        w = self.disorder_strength
        return np.random.default_rng(self.seed).uniform(1 - w, 1 + w, size=nb)


@dataclass(frozen=True)
class SpinOperator:
    """Matrix-free real Hamiltonian in the kernel encoding."""
    num_sites: int
    diag: np.ndarray = field(repr=False)
    flip_masks: np.ndarray
    flip_coeffs: np.ndarray
    hop_masks: np.ndarray
    hop_coeffs: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.num_sites

    def matvec(self, v: np.ndarray, use_numba=None) -> np.ndarray:
        return kernels.spin_matvec(v, self.diag, self.flip_masks, self.flip_coeffs,
                                   self.hop_masks, self.hop_coeffs, use_numba=use_numba)


def spin_operator(spec: HamiltonianSpec, use_numba=None) -> SpinOperator:
    n = spec.num_sites
    bonds = spec.bonds()
    J = spec.couplings()
    left = [a for a, _ in bonds]
    right = [b for _, b in bonds]
    empty_i, empty_f = np.zeros(0, dtype=np.int64), np.zeros(0)
    if spec.model == "tfim":
        diag = kernels.bond_diagonal(n, left, right, -J, use_numba=use_numba)
        fm = np.array([kernels.site_mask(n, i) for i in range(n)], dtype=np.int64)
        return SpinOperator(n, diag, fm, np.full(n, -float(spec.h)), empty_i, empty_f)
    hm = np.array([kernels.site_mask(n, a) | kernels.site_mask(n, b) for a, b in bonds],
                  dtype=np.int64)
    # XX + YY flips an anti-aligned pair with amplitude 2
    return SpinOperator(n, np.zeros(1 << n), empty_i, empty_f, hm, -2.0 * J)


_X = np.array([[0, 1], [1, 0]], dtype=float)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0])


def _embed(ops: dict, n: int) -> np.ndarray:
    return reduce(np.kron, [ops.get(i, np.eye(2)) for i in range(n)])


def dense_hamiltonian(spec: HamiltonianSpec) -> np.ndarray:
    """Explicit Kronecker-product Hamiltonian, for cross-checks at small n."""
    n = spec.num_sites
    if n > 12:
        raise TooLarge("dense Hamiltonian limited to 12 sites")
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for (a, b), j in zip(spec.bonds(), spec.couplings()):
        if spec.model == "tfim":
            H -= j * _embed({a: _Z, b: _Z}, n)
        else:
            H -= j * (_embed({a: _X, b: _X}, n) + _embed({a: _Y, b: _Y}, n))
    if spec.model == "tfim":
        for i in range(n):
            H -= spec.h * _embed({i: _X}, n)
    return H.real


@dataclass(frozen=True)
class GroundStateResult:
    state: PureState
    energy: float
    residual_norm: float
    gap_estimate: float
    degenerate: bool
    iterations: int
    first_excited_energy: float
    couplings: tuple = ()
    disorder_law: str = DISORDER_LAW


def _lanczos_cycle(apply, v0, m, deflate, tol):
    """One Lanczos run of at most m steps; returns Ritz value, vector, steps, estimate."""
    dim = v0.size
    m = min(m, dim - len(deflate))
    V = np.empty((m, dim))
    alpha, beta = [], []
    v = v0
    est = np.inf
    for j in range(m):
        V[j] = v
        w = apply(v)
        a = float(v @ w)
        alpha.append(a)
        # two passes of classical Gram-Schmidt
        for _ in range(2):
            w -= V[:j + 1].T @ (V[:j + 1] @ w)
            for d in deflate:
                w -= d * (d @ w)
        b = float(np.linalg.norm(w))
        if j % 5 == 4 or j == m - 1 or b < 1e-13:
            vals, vecs = eigh_tridiagonal(np.array(alpha), np.array(beta)) if j else (
                np.array(alpha), np.ones((1, 1)))
            est = abs(b * vecs[-1, 0])
            if est < tol or b < 1e-13 or j == m - 1:
                x = V[:j + 1].T @ vecs[:, 0]
                return vals[0], x / np.linalg.norm(x), j + 1, est
        beta.append(b)
        v = w / b
    raise AssertionError("unreachable")


def lanczos_lowest(apply, dim: int, seed=0, deflate=(), tol: float = LANCZOS_TOL,
                   max_iter: int = MAX_LANCZOS_ITER, krylov_dim: int = KRYLOV_DIM):
    """Lowest eigenpair of a real symmetric operator orthogonal to ``deflate``.

    Restarts from the current Ritz vector whenever the Krylov basis fills up.
    Convergence is judged on the explicit residual ||Hx - Ex||.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim)
    for d in deflate:
        x -= d * (d @ x)
    x /= np.linalg.norm(x)
    total = 0
    trace = []
    while total < max_iter:
        e, x, steps, est = _lanczos_cycle(apply, x, min(krylov_dim, max_iter - total),
                                          deflate, tol)
        total += steps
        r = float(np.linalg.norm(apply(x) - e * x))
        trace.append({"iterations": total, "energy": float(e), "residual": r})
        if r <= tol * max(1.0, abs(e)):
            return float(e), x, r, total, trace
    if trace and trace[-1]["residual"] <= MAX_RESIDUAL:
        return float(e), x, trace[-1]["residual"], total, trace
    raise NoConvergence(f"Lanczos residual {trace[-1]['residual']:.3e} after {total} steps", trace)


def _fix_sign(x: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(x) > np.abs(x).max() * (1 - 1e-9)))
    return x if x[i] > 0 else -x


def ground_state(spec: HamiltonianSpec, seed=0, use_numba=None) -> GroundStateResult:
    """Lowest eigenpair plus the first excited level from a deflated second run."""
    op = spin_operator(spec, use_numba)
    apply = lambda v: op.matvec(v, use_numba)  # noqa: E731
    e0, x0, r0, it0, trace = lanczos_lowest(apply, op.dim, seed)
    e1, _, _, it1, _ = lanczos_lowest(apply, op.dim, seed + 1, deflate=(x0,))
    if r0 > MAX_RESIDUAL:
        raise NoConvergence(f"residual {r0:.3e} exceeds {MAX_RESIDUAL}", trace)
    gap = max(e1 - e0, 0.0)
    state = PureState.chain(_fix_sign(x0), spec.num_sites, boundary=spec.boundary,
                            normalize=True)
    return GroundStateResult(state, e0, r0, gap, gap < DEGENERACY_GAP, it0 + it1, e1,
                             tuple(float(j) for j in spec.couplings()))
