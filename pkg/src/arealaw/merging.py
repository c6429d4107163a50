"""Random-measurement decoupling (state merging) experiments.

A tripartite pure state |psi>_ABC is measured on A with N Haar-random
projectors of equal rank. For outcome k the post-measurement state lives
on A'BC, where A' is the support of P_k written in its own basis. The
figures of merit are the decoupling error ``T(rho_A'B, tau_A' (x) rho_B)``
and the distilled entangled fraction between A' and C.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import (DimTooLarge, InvalidSubsystem, NotDivisible, RankTooLarge,
                     ZeroProbabilityOutcome)
from .entropies import region_entropy
from .qcore import MAX_PURE_SITES, DensityOperator, PureState, fidelity, trace_distance

log = logging.getLogger(__name__)

ZERO_PROBABILITY = 1e-12
EBIT_RANK_CUTOFF = 1e-8
MAX_EXHAUSTIVE_OUTCOMES = 64


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases removed."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class MeasurementEnsemble:
    dim_A: int
    num_outcomes: int
    isometries: tuple = field(repr=False)
    seed: object = None

    @property
    def rank(self) -> int:
        return self.dim_A // self.num_outcomes

    @property
    def projectors(self) -> list:
        return [v @ v.conj().T for v in self.isometries]


def random_measurement_ensemble(dim_A: int, num_outcomes: int, seed=None) -> MeasurementEnsemble:
    """Projectors onto consecutive column blocks of one Haar unitary."""
    if num_outcomes < 1 or dim_A % num_outcomes:
        raise NotDivisible(f"{num_outcomes} outcomes do not divide dim {dim_A}")
    u = haar_unitary(dim_A, seed)
    r = dim_A // num_outcomes
    blocks = tuple(u[:, k * r:(k + 1) * r] for k in range(num_outcomes))
    return MeasurementEnsemble(dim_A, num_outcomes, blocks, seed if isinstance(seed, int) else None)


@dataclass(frozen=True)
class MergeOutcome:
    outcome_index: int
    probability: float
    post_state: PureState = field(repr=False)
    decoupling_error: float
    decoupling_error_pre: float
    entangled_fraction: float
    ebits_available: float


def _party_dims(state: PureState, split):
    na, nb, nc = split
    if na < 1 or nb < 0 or nc < 1 or na + nb + nc != state.num_sites:
        raise InvalidSubsystem(f"split {split} does not cover {state.num_sites} sites")
    d = state.dims
    return prod(d[:na]), prod(d[na:na + nb]), prod(d[na + nb:])


def _gram_rows(m: np.ndarray) -> np.ndarray:
    return m @ m.conj().T


def outcome_probabilities(state: PureState, split, ensemble: MeasurementEnsemble) -> np.ndarray:
    da, db, dc = _party_dims(state, split)
    psi = state.amplitudes.reshape(da, db * dc)
    return np.array([np.linalg.norm(v.conj().T @ psi) ** 2 for v in ensemble.isometries])


def apply_merging(state_ABC: PureState, split, ensemble: MeasurementEnsemble, k: int) -> MergeOutcome:
    na, nb, nc = split
    da, db, dc = _party_dims(state_ABC, split)
    if ensemble.dim_A != da:
        raise InvalidSubsystem(f"ensemble acts on dim {ensemble.dim_A}, A has dim {da}")
    if not 0 <= k < ensemble.num_outcomes:
        raise IndexError(f"outcome {k} out of range")
    psi = state_ABC.amplitudes.reshape(da, db * dc)
    phi = ensemble.isometries[k].conj().T @ psi
    p = float(np.linalg.norm(phi) ** 2)
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome(f"outcome {k} has probability {p:.3e}")
    phi = phi / np.sqrt(p)
    r = ensemble.rank

    t = phi.reshape(r, db, dc)
    rho_ab = _gram_rows(t.reshape(r * db, dc))
    rho_b = np.einsum("abac->bc", rho_ab.reshape(r, db, r, db))
    rho_a = np.einsum("abcb->ac", rho_ab.reshape(r, db, r, db))
    full = state_ABC.amplitudes.reshape(da, db, dc)
    pre = np.einsum("abc,adc->bd", full, full.conj())

    dims_ab = (r, db)
    rho_ab_op = DensityOperator(rho_ab, dims_ab, validate=False)
    tau = np.eye(r) / r
    err = trace_distance(rho_ab_op, DensityOperator(np.kron(tau, rho_b), dims_ab, validate=False))
    err_pre = trace_distance(rho_ab_op, DensityOperator(np.kron(tau, pre), dims_ab, validate=False))

    w, v = np.linalg.eigh(rho_a)
    support = v[:, w > EBIT_RANK_CUTOFF]
    rank = support.shape[1]
    tau_supp = support @ support.conj().T / rank
    frac = fidelity(rho_ab_op, DensityOperator(np.kron(tau_supp, rho_b), dims_ab, validate=False)) ** 2

    post_dims = (r,) + state_ABC.dims[na:]
    post = PureState(phi.reshape(-1), post_dims, partition=(1, nb, nc))
    return MergeOutcome(k, p, post, err, err_pre, float(frac), float(np.log2(rank)))


def entangled_fraction(psi: PureState, r: int, split: int = 1) -> float:
    """Best overlap of a bipartite pure state with a rank-r maximally entangled state.

    With Schmidt coefficients s_1 >= s_2 >= ... this is ``(sum_{i<=r} s_i)^2 / r``.
    """
    da = prod(psi.dims[:split])
    dc = prod(psi.dims[split:])
    if not 1 <= r <= min(da, dc):
        raise RankTooLarge(f"r = {r} exceeds min Schmidt dimension {min(da, dc)}")
    s = np.linalg.svd(psi.amplitudes.reshape(da, dc), compute_uv=False)
    return float(s[:r].sum() ** 2 / r)


def distillation_rate(state_ABC: PureState, split) -> float:
    """-H(A|C) = H(C) - H(AC); checked against H(C) - H(B)."""
    na, nb, nc = split
    _party_dims(state_ABC, split)
    if state_ABC.num_sites > MAX_PURE_SITES:
        raise DimTooLarge(f"{state_ABC.num_sites} sites exceeds {MAX_PURE_SITES}")
    n = state_ABC.num_sites
    a = list(range(na))
    b = list(range(na, na + nb))
    c = list(range(na + nb, n))
    h_c = region_entropy(state_ABC, c)
    h_ac = region_entropy(state_ABC, a + c)
    h_b = region_entropy(state_ABC, b) if b else 0.0
    if abs(h_ac - h_b) > 1e-8:
        raise AssertionError(f"H(AC) = {h_ac} differs from H(B) = {h_b} on a pure state")
    return h_c - h_ac


def mutual_information_AB(state_ABC: PureState, split) -> float:
    na, nb, _ = split
    a = list(range(na))
    b = list(range(na, na + nb))
    if not b:
        return 0.0
    return region_entropy(state_ABC, a) + region_entropy(state_ABC, b) - region_entropy(state_ABC, a + b)


def copies_state(state: PureState, split, copies: int) -> tuple:
    """|psi>^{(x) n} with sites regrouped as A^n B^n C^n; returns (state, split)."""
    na, nb, nc = split
    _party_dims(state, split)
    if copies * state.num_sites > MAX_PURE_SITES:
        raise DimTooLarge(f"{copies} copies of {state.num_sites} sites exceeds {MAX_PURE_SITES}")
    if copies == 1:
        return state, tuple(split)
    t = state.tensor()
    n = state.num_sites
    big = t
    for _ in range(copies - 1):
        big = np.multiply.outer(big, t)
    order = []
    for lo, hi in ((0, na), (na, na + nb), (na + nb, n)):
        for c in range(copies):
            order.extend(c * n + s for s in range(lo, hi))
    big = np.transpose(big, order)
    dims = tuple(state.dims[s % n] for s in order)
    new = PureState(big.reshape(-1), dims, state.boundary)
    return new, (na * copies, nb * copies, nc * copies)


def choose_num_outcomes(mutual_info: float, copies: int, dim_A: int) -> int:
    """2^round(n I(A:B)), clamped to a power of two dividing dim_A."""
    target = 2 ** max(0, int(round(copies * mutual_info)))
    n = 1
    while n * 2 <= target and dim_A % (n * 2) == 0:
        n *= 2
    if n != target:
        log.info("num_outcomes clamped from %d to %d (dim_A = %d)", target, n, dim_A)
    return n


@dataclass
class MergeStatistics:
    copies: int
    num_outcomes: int
    mutual_information: float
    distillation_rate: float
    mode: str
    samples: int
    outcomes: list = field(default_factory=list, repr=False)
    weights: list = field(default_factory=list, repr=False)
    mean_decoupling_error: float | None = None
    median_decoupling_error: float | None = None
    mean_decoupling_error_pre: float | None = None
    mean_entangled_fraction: float | None = None
    median_entangled_fraction: float | None = None
    mean_ebits: float | None = None

    def summary(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if k not in ("outcomes", "weights")}


def _weighted_median(values, weights):
    order = np.argsort(values)
    v = np.asarray(values)[order]
    w = np.asarray(weights)[order]
    c = np.cumsum(w) / w.sum()
    return float(v[np.searchsorted(c, 0.5)])


def merging_experiment(state: PureState, split, copies: int = 1, outcome_samples: int = 50,
                       seed=0, mode: str = "born") -> MergeStatistics:
    """Repeat the random measurement ``outcome_samples`` times on |psi>^{(x) n}.

    Each sample draws a fresh Haar ensemble from its own child seed. In
    ``born`` mode one outcome is drawn per ensemble with Born weights; in
    ``exhaustive`` mode every outcome contributes, weighted by probability.
    """
    if mode not in ("born", "exhaustive"):
        raise ValueError(f"unknown mode {mode!r}")
    if copies not in (1, 2, 3):
        raise DimTooLarge("copies must be 1, 2 or 3")
    big, big_split = copies_state(state, split, copies)
    mi = mutual_information_AB(state, split)
    da = _party_dims(big, big_split)[0]
    n_out = choose_num_outcomes(mi, copies, da)
    if mode == "exhaustive" and n_out > MAX_EXHAUSTIVE_OUTCOMES:
        raise DimTooLarge(f"exhaustive mode limited to {MAX_EXHAUSTIVE_OUTCOMES} outcomes")
    stats = MergeStatistics(copies, n_out, mi, copies * distillation_rate(state, split), mode,
                            outcome_samples)
    if outcome_samples <= 0:
        return stats

    children = np.random.SeedSequence(seed).spawn(outcome_samples)
    for child in children:
        rng = np.random.default_rng(child)
        ens = random_measurement_ensemble(da, n_out, rng)
        probs = outcome_probabilities(big, big_split, ens)
        if mode == "born":
            k = int(rng.choice(n_out, p=probs / probs.sum()))
            stats.outcomes.append(apply_merging(big, big_split, ens, k))
            stats.weights.append(1.0)
        else:
            for k in range(n_out):
                if probs[k] < ZERO_PROBABILITY:
                    continue
                stats.outcomes.append(apply_merging(big, big_split, ens, k))
                stats.weights.append(float(probs[k]))

    w = np.asarray(stats.weights)
    err = [o.decoupling_error for o in stats.outcomes]
    frac = [o.entangled_fraction for o in stats.outcomes]
    stats.mean_decoupling_error = float(np.average(err, weights=w))
    stats.median_decoupling_error = _weighted_median(err, w)
    stats.mean_decoupling_error_pre = float(np.average([o.decoupling_error_pre for o in stats.outcomes], weights=w))
    stats.mean_entangled_fraction = float(np.average(frac, weights=w))
    stats.median_entangled_fraction = _weighted_median(frac, w)
    stats.mean_ebits = float(np.average([o.ebits_available for o in stats.outcomes], weights=w))
    return stats


def merging_trend(state: PureState, split, copies=(1, 2), outcome_samples: int = 50,
                  seed=0, mode: str = "born") -> list:
    """Statistics for each copy number, sharing the master seed."""
    return [merging_experiment(state, split, n, outcome_samples, seed, mode) for n in copies]
