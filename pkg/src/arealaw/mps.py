"""Open-boundary matrix product states.

Site tensors have shape ``(left bond, physical, right bond)``. Truncation
keeps ``min(d_max, #{s_i >= cutoff * s_1})`` singular values per cut; the
discarded weight at a cut is the sum of squared dropped Schmidt values
(2-norm convention).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import RegionTooLarge, RingUnsupported, TooLarge
from .qcore import (MAX_PURE_SITES, DensityOperator, PureState, Region, marginal_spectrum,
                    reduced_density, trace_distance)

DEFAULT_CUTOFF = 1e-14
MAX_MARGINAL_SITES = 8


@dataclass(frozen=True)
class MPSState:
    site_tensors: tuple = field(repr=False)
    canonical: str = "none"

    def __post_init__(self):
        ts = tuple(np.asarray(t, dtype=complex) for t in self.site_tensors)
        if ts[0].shape[0] != 1 or ts[-1].shape[2] != 1:
            raise ValueError("boundary bonds must have dimension 1")
        for a, b in zip(ts, ts[1:]):
            if a.shape[2] != b.shape[0]:
                raise ValueError(f"bond mismatch {a.shape} -> {b.shape}")
        if self.canonical not in ("left", "right", "none"):
            raise ValueError(f"unknown canonical form {self.canonical!r}")
        object.__setattr__(self, "site_tensors", ts)

    @property
    def num_sites(self) -> int:
        return len(self.site_tensors)

    @property
    def bond_dims(self) -> list:
        return [t.shape[2] for t in self.site_tensors[:-1]]

    @property
    def physical_dims(self) -> tuple:
        return tuple(t.shape[1] for t in self.site_tensors)

    def left_isometry_defect(self) -> float:
        worst = 0.0
        for t in self.site_tensors:
            m = t.reshape(-1, t.shape[2])
            worst = max(worst, float(np.abs(m.conj().T @ m - np.eye(t.shape[2])).max()))
        return worst


@dataclass(frozen=True)
class TruncationReport:
    per_cut_discarded_weight: list
    global_error_bound: float
    achieved_bond_dims: list
    sweep_discarded_weight: list
    norm_retained: float


def _keep_count(s: np.ndarray, d_max, cutoff: float) -> int:
    if s.size == 0 or s[0] <= 0:
        return 1
    k = int((s >= cutoff * s[0]).sum())
    if d_max is not None:
        k = min(k, int(d_max))
    return max(k, 1)


def schmidt_values(state: PureState, cut: int) -> np.ndarray:
    """Schmidt coefficients across the cut between sites ``cut - 1`` and ``cut``."""
    return np.sqrt(marginal_spectrum(state, list(range(cut))))


def dense_to_mps(state: PureState, d_max: int | None = None, cutoff: float = DEFAULT_CUTOFF,
                 cut_ring: bool = False) -> tuple:
    """Left-canonical MPS by a left-to-right SVD sweep, plus a truncation report.

    Ring states are rejected unless ``cut_ring`` is set, in which case the
    ring is opened between the last site and site 0.
    """
    if state.boundary == "ring" and not cut_ring:
        raise RingUnsupported("pass cut_ring=True to open the ring at site 0")
    n = state.num_sites
    if n > MAX_PURE_SITES:
        raise TooLarge(f"{n} sites exceeds {MAX_PURE_SITES}")
    dims = state.dims

    tails = []
    for cut in range(1, n):
        s = schmidt_values(state, cut)
        k = _keep_count(s, d_max, cutoff)
        tails.append(float((s[k:] ** 2).sum()))

    tensors = []
    sweep = []
    rest = state.amplitudes.reshape(1, -1)
    dl = 1
    for j in range(n - 1):
        m = rest.reshape(dl * dims[j], -1)
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        k = _keep_count(s, d_max, cutoff)
        sweep.append(float((s[k:] ** 2).sum()))
        tensors.append(u[:, :k].reshape(dl, dims[j], k))
        rest = s[:k, None] * vh[:k]
        dl = k
    norm = float(np.linalg.norm(rest))
    tensors.append((rest / norm).reshape(dl, dims[-1], 1))

    weights = [max(a, b) for a, b in zip(tails, sweep)]
    report = TruncationReport(
        per_cut_discarded_weight=weights,
        global_error_bound=float(sum(np.sqrt(w) for w in weights)),
        achieved_bond_dims=[t.shape[2] for t in tensors[:-1]],
        sweep_discarded_weight=sweep,
        norm_retained=norm,
    )
    return MPSState(tuple(tensors), "left"), report


def mps_to_dense(mps: MPSState, normalize: bool = False) -> PureState:
    if mps.num_sites > MAX_PURE_SITES:
        raise TooLarge(f"{mps.num_sites} sites exceeds {MAX_PURE_SITES}")
    v = np.ones((1, 1), dtype=complex)
    for t in mps.site_tensors:
        v = np.tensordot(v, t, axes=([1], [0])).reshape(-1, t.shape[2])
    amps = v.reshape(-1)
    if normalize:
        amps = amps / np.linalg.norm(amps)
    return PureState(amps, mps.physical_dims)


def left_canonicalize(mps: MPSState) -> MPSState:
    if mps.canonical == "left":
        return mps
    ts = list(mps.site_tensors)
    for j in range(len(ts) - 1):
        dl, d, dr = ts[j].shape
        q, r = np.linalg.qr(ts[j].reshape(dl * d, dr))
        ts[j] = q.reshape(dl, d, q.shape[1])
        ts[j + 1] = np.tensordot(r, ts[j + 1], axes=([1], [0]))
    last = ts[-1]
    ts[-1] = last / np.linalg.norm(last)
    return MPSState(tuple(ts), "left")


def schmidt_spectra(mps: MPSState) -> list:
    """Schmidt coefficients at every interior cut, via a right-to-left SVD sweep."""
    ts = list(left_canonicalize(mps).site_tensors)
    out = []
    for j in range(len(ts) - 1, 0, -1):
        dl, d, dr = ts[j].shape
        u, s, vh = np.linalg.svd(ts[j].reshape(dl, d * dr), full_matrices=False)
        out.append(s)
        ts[j] = vh.reshape(-1, d, dr)
        ts[j - 1] = np.tensordot(ts[j - 1], u * s, axes=([2], [0]))
    return out[::-1]


def bond_entropies(mps: MPSState) -> list:
    """Von Neumann entropy (bits) of the squared Schmidt spectrum at each cut."""
    from .entropies import entropy_of_spectrum
    return [entropy_of_spectrum(s ** 2) for s in schmidt_spectra(mps)]


def _left_env(ts, stop):
    env = np.ones((1, 1), dtype=complex)
    for t in ts[:stop]:
        env = np.einsum("ab,asc,bsd->cd", env, t, t.conj(), optimize=True)
    return env


def _right_env(ts, start):
    env = np.ones((1, 1), dtype=complex)
    for t in reversed(ts[start:]):
        env = np.einsum("asc,cd,bsd->ab", t, env, t.conj(), optimize=True)
    return env


def local_marginal(mps: MPSState, region: Region) -> DensityOperator:
    """Reduced density operator of a contiguous region by transfer contraction."""
    if region.length > MAX_MARGINAL_SITES:
        raise RegionTooLarge(f"region length {region.length} > {MAX_MARGINAL_SITES}")
    sites = region.sites(mps.num_sites, "line")
    ts = mps.site_tensors
    lo, hi = sites[0], sites[-1] + 1
    left = _left_env(ts, lo)
    right = _right_env(ts, hi)
    theta = ts[lo]
    for t in ts[lo + 1:hi]:
        theta = np.tensordot(theta, t, axes=([theta.ndim - 1], [0]))
    dl, dr = theta.shape[0], theta.shape[-1]
    theta = theta.reshape(dl, -1, dr)
    rho = np.einsum("ab,aic,cd,bjd->ij", left, theta, right, theta.conj(), optimize=True)
    rho = rho / np.trace(rho).real
    dims = tuple(mps.physical_dims[s] for s in sites)
    return DensityOperator(rho, dims, validate=False)


@dataclass(frozen=True)
class Corollary1Table:
    k: int
    rows: list
    monotone: bool

    def column(self) -> list:
        return [r["max_trace_distance"] for r in self.rows]


def corollary1_check(state: PureState, k: int, d_values: Sequence[int],
                     cutoff: float = DEFAULT_CUTOFF) -> Corollary1Table:
    """Worst local-marginal error of bond-D truncations over regions of <= k sites."""
    if state.num_sites > 14:
        raise TooLarge("corollary check limited to 14 sites")
    if not 1 <= k <= 4:
        raise RegionTooLarge("k must lie in 1..4")
    n = state.num_sites
    regions = [Region(s, ln) for ln in range(1, k + 1) for s in range(n - ln + 1)]
    exact = [reduced_density(state, r) for r in regions]
    rows = []
    for D in sorted(d_values):
        mps, rep = dense_to_mps(state, D, cutoff, cut_ring=True)
        errs = [trace_distance(e, local_marginal(mps, r)) for e, r in zip(exact, regions)]
        i = int(np.argmax(errs))
        rows.append({
            "D": int(D),
            "max_trace_distance": float(errs[i]),
            "worst_region_start": regions[i].start,
            "worst_region_length": regions[i].length,
            "global_error_bound": rep.global_error_bound,
            "max_bond_dim": max(rep.achieved_bond_dims, default=1),
        })
    col = [r["max_trace_distance"] for r in rows]
    monotone = all(b <= a + 1e-9 for a, b in zip(col, col[1:]))
    return Corollary1Table(k, rows, monotone)
