"""Dense states, density operators, partial traces and distance measures.

Site ordering is big-endian: site 0 is the most significant tensor factor,
so a state on dims ``(d0, d1, ...)`` reshapes to an array with axis ``i``
indexing site ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, InitVar
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import (DimMismatch, InvalidRegion, InvalidSubsystem, NotAState,
                     RegionTooLarge)

MAX_PURE_SITES = 16
MAX_DENSITY_SITES = 10

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-12
RANK_CUTOFF = 1e-12

BOUNDARIES = ("line", "ring")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Normalised amplitude vector over a chain of subsystems.

    ``partition`` optionally records a contiguous split of the sites into
    named parties, e.g. ``(nA, nB, nC)`` for tripartite generators.
    """

    amplitudes: np.ndarray
    dims: tuple
    boundary: str = "line"
    partition: tuple | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if amps.size != prod(dims):
            raise NotAState(f"amplitude length {amps.size} != prod(dims) {prod(dims)}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}")
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise NotAState(f"state norm {np.linalg.norm(amps)!r} differs from 1")
        if self.partition is not None and sum(self.partition) != len(dims):
            raise InvalidSubsystem("partition must cover every site")
        object.__setattr__(self, "amplitudes", _frozen(amps))
        object.__setattr__(self, "dims", dims)

    @classmethod
    def chain(cls, amplitudes, num_sites=None, local_dim=2, boundary="line",
              normalize=False, partition=None) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if num_sites is None:
            num_sites = int(round(np.log(amps.size) / np.log(local_dim)))
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(amps, (local_dim,) * num_sites, boundary, partition)

    @property
    def num_sites(self) -> int:
        return len(self.dims)

    @property
    def local_dim(self) -> int:
        if len(set(self.dims)) != 1:
            raise ValueError("state has non-uniform local dimensions")
        return self.dims[0]

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix with subsystem dims.

    Pass ``validate=False`` only for matrices that are PSD by construction.
    """

    matrix: np.ndarray
    dims: tuple
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        m = np.asarray(self.matrix, dtype=complex)
        dims = tuple(int(d) for d in self.dims)
        n = prod(dims)
        if m.shape != (n, n):
            raise DimMismatch(f"matrix shape {m.shape} does not match dims {dims}")
        if validate:
            m = _checked_hermitian(m)
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise NotAState(f"trace {tr!r} differs from 1")
            lo = np.linalg.eigvalsh(m)[0]
            if lo < -PSD_TOL:
                raise NotAState(f"negative eigenvalue {lo!r}")
        else:
            m = 0.5 * (m + m.conj().T)
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues sorted descending."""
        return np.linalg.eigvalsh(self.matrix)[::-1]


@dataclass(frozen=True)
class Region:
    start: int
    length: int

    def sites(self, num_sites: int, boundary: str = "line") -> list:
        if self.length < 1 or self.start < 0 or self.start >= num_sites:
            raise InvalidRegion(f"bad region {self} for {num_sites} sites")
        if boundary == "ring":
            if self.length > num_sites:
                raise InvalidRegion(f"region {self} longer than ring of {num_sites}")
            return [(self.start + k) % num_sites for k in range(self.length)]
        if self.start + self.length > num_sites:
            raise InvalidRegion(f"region {self} runs past the end of a {num_sites}-site line")
        return list(range(self.start, self.start + self.length))


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _checked_hermitian(m: np.ndarray) -> np.ndarray:
    defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if defect > HERMITIAN_TOL:
        raise NotAState(f"matrix not Hermitian (defect {defect:.3e})")
    return 0.5 * (m + m.conj().T)


def spectral_decomposition(m) -> SpectralDecomposition:
    if isinstance(m, DensityOperator):
        m = m.matrix
    w, v = np.linalg.eigh(_checked_hermitian(np.asarray(m, dtype=complex)))
    return SpectralDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


# --------------------------------------------------------------------------
# marginals

def _validate_sites(state: PureState, sites: Sequence[int]) -> list:
    sites = [int(s) for s in sites]
    if not sites:
        raise InvalidRegion("empty site set")
    if len(set(sites)) != len(sites):
        raise InvalidRegion(f"repeated sites in {sites}")
    for s in sites:
        if not 0 <= s < state.num_sites:
            raise InvalidRegion(f"site {s} out of range for {state.num_sites} sites")
    return sites


def schmidt_matrix(state: PureState, sites: Sequence[int]) -> np.ndarray:
    """Amplitudes reshaped to (prod dims of ``sites``, rest), ``sites`` order kept."""
    sites = _validate_sites(state, sites)
    rest = [s for s in range(state.num_sites) if s not in sites]
    t = np.transpose(state.tensor(), sites + rest)
    d = prod(state.dims[s] for s in sites)
    return t.reshape(d, -1)


def marginal_spectrum(state: PureState, sites: Sequence[int]) -> np.ndarray:
    """Eigenvalues (descending) of the marginal on ``sites``.

    Uses the Gram matrix of the smaller side of the bipartition, so it works
    for regions of any size.
    """
    m = schmidt_matrix(state, sites)
    if m.shape[0] <= m.shape[1]:
        g = m @ m.conj().T
    else:
        g = m.conj().T @ m
    w = np.linalg.eigvalsh(g)[::-1]
    return np.clip(w, 0.0, None)


def reduced_density_sites(state: PureState, sites: Sequence[int],
                          max_sites: int = MAX_DENSITY_SITES) -> DensityOperator:
    sites = _validate_sites(state, sites)
    if len(sites) > max_sites:
        raise RegionTooLarge(f"{len(sites)} sites exceeds the {max_sites}-site density cap")
    m = schmidt_matrix(state, sites)
    return DensityOperator(m @ m.conj().T, tuple(state.dims[s] for s in sites), validate=False)


def reduced_density(state: PureState, region: Region) -> DensityOperator:
    """Marginal of ``state`` on a contiguous region (wrapping on rings)."""
    if region.length > MAX_DENSITY_SITES:
        raise RegionTooLarge(f"region length {region.length} > {MAX_DENSITY_SITES}")
    return reduced_density_sites(state, region.sites(state.num_sites, state.boundary))


def density_from_pure(state: PureState) -> DensityOperator:
    if state.num_sites > MAX_DENSITY_SITES and prod(state.dims) > 4 ** MAX_DENSITY_SITES:
        raise RegionTooLarge("state too large for an explicit density operator")
    a = state.amplitudes
    return DensityOperator(np.outer(a, a.conj()), state.dims, validate=False)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every subsystem not in ``keep``; kept factors stay in ascending order."""
    keep = sorted(set(int(k) for k in keep))
    n = len(rho.dims)
    if not keep or any(not 0 <= k < n for k in keep):
        raise InvalidSubsystem(f"keep={keep} invalid for {n} subsystems")
    if len(keep) == n:
        return rho
    t = rho.matrix.reshape(rho.dims + rho.dims)
    # einsum subscripts: row index i_k, column index j_k; traced pairs share a letter
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows, cols = [], []
    for k in range(n):
        r = next(letters)
        rows.append(r)
        cols.append(r if k not in keep else next(letters))
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    dims = tuple(rho.dims[k] for k in keep)
    d = prod(dims)
    return DensityOperator(red.reshape(d, d), dims, validate=False)


def tensor_product(*rhos: DensityOperator) -> DensityOperator:
    m = np.ones((1, 1), dtype=complex)
    dims = ()
    for r in rhos:
        m = np.kron(m, r.matrix)
        dims += r.dims
    return DensityOperator(m, dims, validate=False)


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d) / d, (d,), validate=False)


# --------------------------------------------------------------------------
# purification

def _phase_fix(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible entry is real positive."""
    v = v.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        k = int(np.argmax(np.abs(col) > 1e-10))
        v[:, j] = col * (abs(col[k]) / col[k])
    return v


def purify(rho: DensityOperator) -> PureState:
    """Eigen-purification sum_i sqrt(l_i) |v_i>|i> on dims ``rho.dims + (rank,)``.

    Eigenvalues are ordered descending; ties are ordered by the position of
    the eigenvector's first non-negligible entry so that e.g. I/2 purifies to
    (|00> + |11>)/sqrt(2).
    """
    dec = spectral_decomposition(rho.matrix)
    keep = dec.eigenvalues > RANK_CUTOFF
    w = dec.eigenvalues[keep]
    v = _phase_fix(dec.eigenvectors[:, keep])
    lead = np.argmax(np.abs(v) > 1e-10, axis=0)
    order = np.lexsort((lead, -np.round(w, 10)))
    w, v = w[order], v[:, order]
    amps = (v * np.sqrt(w)).reshape(-1)
    amps = amps / np.linalg.norm(amps)
    return PureState(amps, rho.dims + (len(w),))


# --------------------------------------------------------------------------
# distances

def _same_dims(rho: DensityOperator, sigma: DensityOperator):
    if rho.dim != sigma.dim:
        raise DimMismatch(f"dimension {rho.dim} vs {sigma.dim}")


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    _same_dims(rho, sigma)
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(min(1.0, 0.5 * np.abs(w).sum()))


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Root fidelity ||sqrt(rho) sqrt(sigma)||_1 (not squared)."""
    _same_dims(rho, sigma)
    s = np.linalg.svd(psd_sqrt(rho.matrix) @ psd_sqrt(sigma.matrix), compute_uv=False)
    return float(min(1.0, s.sum()))


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values; Hermitian inputs go through eigvalsh."""
    if np.allclose(m, m.conj().T, atol=1e-12):
        return float(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T))).sum())
    return float(np.linalg.svd(m, compute_uv=False).sum())
