"""Saturation scan and the premise/conclusion report for the area-law argument.

Nothing here asserts an implication. Each check is stored as a
:class:`Comparison` that keeps the two numbers it compares, so a loaded
record can be re-validated.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from ..correlations import cor_estimate
from ..entropies import SmoothingSpec, i_max, region_entropy, region_max_entropy
from ..errors import InvalidRegion, RegionTooLarge
from ..qcore import MAX_DENSITY_SITES, MAX_PURE_SITES, PureState, reduced_density_sites

COMPARISON_SLACK = 1e-12
VARIANTS = ("von_neumann", "single_shot")


def window_sites(num_sites: int, boundary: str, start: int, l: int):
    """(B_L, B_C, B_R) of sizes (l, 2l, l) starting at ``start``."""
    idx = [start + i for i in range(4 * l)]
    if boundary == "ring":
        idx = [i % num_sites for i in idx]
    elif idx[-1] >= num_sites or start < 0:
        raise InvalidRegion(f"window [{start}, {start + 4 * l}) leaves the chain")
    return idx[:l], idx[l:3 * l], idx[3 * l:]


def window_mutual_information(state: PureState, bl, bc, br) -> float:
    """I(B_C : B_L B_R) from three marginal spectra."""
    outer = list(bl) + list(br)
    return (region_entropy(state, bc) + region_entropy(state, outer)
            - region_entropy(state, sorted(outer + list(bc))))


@dataclass(frozen=True)
class SaturationResult:
    found: bool
    epsilon: float
    site: int
    l0: int
    l: int | None = None
    start: int | None = None
    b_left: tuple = ()
    b_center: tuple = ()
    b_right: tuple = ()
    value: float | None = None
    inspected: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def saturation_scan(state: PureState, epsilon: float, site: int = 0, l0: int = 1) -> SaturationResult:
    """First window with I(B_C : B_L B_R) <= epsilon * l.

    Scales run through l0, 2 l0, 4 l0, ... while the window fits; at each
    scale, window starts are tried in order of the window centre's distance
    from ``site``. A miss returns ``found=False`` with every inspected triple.
    """
    n = state.num_sites
    if n > MAX_PURE_SITES:
        raise RegionTooLarge(f"{n} sites exceeds {MAX_PURE_SITES}")
    if epsilon <= 0 or l0 < 1:
        raise ValueError("need epsilon > 0 and l0 >= 1")
    ring = state.boundary == "ring"
    inspected = []
    l = l0
    while 4 * l <= n:
        starts = range(n) if ring else range(n - 4 * l + 1)

        def dist(p):
            c = p + 2 * l - 0.5
            d = abs(c - site)
            return (min(d, n - d) if ring else d, p)

        for p in sorted(starts, key=dist):
            bl, bc, br = window_sites(n, state.boundary, p, l)
            val = window_mutual_information(state, bl, bc, br)
            inspected.append({"l": l, "start": p, "I_bits": val})
            if val <= epsilon * l:
                return SaturationResult(True, epsilon, site, l0, l, p, tuple(bl), tuple(bc),
                                        tuple(br), val, inspected)
        l *= 2
    return SaturationResult(False, epsilon, site, l0, inspected=inspected)


@dataclass(frozen=True)
class Comparison:
    """``holds`` records whether ``lhs <= rhs``."""
    name: str
    lhs_label: str
    lhs: float
    rhs_label: str
    rhs: float
    holds: bool
    details: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name, lhs_label, lhs, rhs_label, rhs, **details):
        lhs, rhs = float(lhs), float(rhs)
        return cls(name, lhs_label, lhs, rhs_label, rhs, lhs <= rhs + COMPARISON_SLACK, details)

    def consistent(self) -> bool:
        return self.holds == (self.lhs <= self.rhs + COMPARISON_SLACK)


@dataclass(frozen=True)
class ChainGeometry:
    """Sites for the X|Y|Z split and/or the B_L|B_C|B_R window (R is the rest)."""
    x: tuple = ()
    y: tuple = ()
    z: tuple = ()
    b_left: tuple = ()
    b_center: tuple = ()
    b_right: tuple = ()

    @classmethod
    def blocks(cls, x_len: int, y_len: int, z_len: int, start: int = 0, **window):
        x = tuple(range(start, start + x_len))
        y = tuple(range(x[-1] + 1, x[-1] + 1 + y_len))
        z = tuple(range(y[-1] + 1, y[-1] + 1 + z_len))
        return cls(x, y, z, **window)

    @classmethod
    def from_window(cls, num_sites: int, start: int, l: int, boundary: str = "line", **xyz):
        bl, bc, br = window_sites(num_sites, boundary, start, l)
        return cls(b_left=tuple(bl), b_center=tuple(bc), b_right=tuple(br), **xyz)

    @property
    def has_xyz(self) -> bool:
        return bool(self.x and self.y and self.z)

    @property
    def has_window(self) -> bool:
        return bool(self.b_left and self.b_center and self.b_right)


@dataclass(frozen=True)
class ProofChainRecord:
    variant: str
    geometry: dict
    premises: list
    conclusions: list
    epsilon: float
    xi: float | None = None
    naive_intuition_violated: bool | None = None
    notes: list = field(default_factory=list)

    def consistent(self) -> bool:
        return all(c.consistent() for c in self.premises + self.conclusions)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ProofChainRecord":
        d = dict(d)
        d["premises"] = [Comparison(**c) for c in d["premises"]]
        d["conclusions"] = [Comparison(**c) for c in d["conclusions"]]
        rec = cls(**d)
        if not rec.consistent():
            raise ValueError("record booleans disagree with their attached numbers")
        return rec


def _cor_between(state: PureState, a, b, restarts: int, seed):
    sites = list(a) + list(b)
    if len(sites) > MAX_DENSITY_SITES:
        raise RegionTooLarge(f"{len(sites)} sites exceeds the {MAX_DENSITY_SITES}-site cap")
    rho = reduced_density_sites(state, sites)
    return cor_estimate(rho, restarts=restarts, seed=seed, split=len(a))


def proof_chain_report(state: PureState, geometry: ChainGeometry, variant: str = "von_neumann",
                       epsilon: float = 0.0, xi: float | None = None, restarts: int = 8,
                       seed=0) -> ProofChainRecord:
    """Evaluate the premises and conclusions of both reduction steps.

    X|Y|Z: premise Cor(X:Z) <= 2^{-2 H(Y)}, conclusion H(Z) <= H(Y); with a
    correlation length ``xi`` the decay premise Cor(X:Z) <= 2^{-|Y|/xi} is added.
    B_L|B_C|B_R|R: premise Cor(B_C:R) <= 2^{-I(B_C:B_L B_R)}, conclusion
    H(B_C) <= I(B_C:B_L B_R). The single-shot variant replaces H by the
    smoothed max-entropy and I by I_max. Cor uses the certified lower bound.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    single = variant == "single_shot"
    spec = SmoothingSpec(epsilon)
    H = (lambda s: region_max_entropy(state, list(s), spec)) if single else (
        lambda s: region_entropy(state, list(s)))
    tag = "H_max" if single else "H"
    premises, conclusions, notes = [], [], []
    naive = None

    if geometry.has_xyz:
        cor = _cor_between(state, geometry.x, geometry.z, restarts, seed)
        hy, hz = H(geometry.y), H(geometry.z)
        extra = {"cor_upper": cor.upper_bound}
        premises.append(Comparison.make("cor_xz_below_entropy_bound", "Cor(X:Z)", cor.lower_bound,
                                        f"2^(-2 {tag}(Y))", 2.0 ** (-2 * hy), **extra))
        if xi is not None and np.isfinite(xi) and xi > 0:
            l = len(geometry.y)
            premises.append(Comparison.make("cor_xz_below_decay_bound", "Cor(X:Z)", cor.lower_bound,
                                            "2^(-l/xi)", 2.0 ** (-l / xi), l=l, xi=xi, **extra))
        else:
            notes.append("decay premise skipped: no correlation length")
        concl = Comparison.make("z_entropy_below_y", f"{tag}(Z)", hz, f"{tag}(Y)", hy)
        conclusions.append(concl)
        naive = not concl.holds

    if geometry.has_window:
        bc = list(geometry.b_center)
        outer = list(geometry.b_left) + list(geometry.b_right)
        if single:
            rho = reduced_density_sites(state, bc + outer)
            info = i_max(rho, spec, split=len(bc))
            ilabel = "I_max(B_C:B_L B_R)"
        else:
            info = window_mutual_information(state, geometry.b_left, bc, geometry.b_right)
            ilabel = "I(B_C:B_L B_R)"
        window = set(bc + outer)
        rest = [s for s in range(state.num_sites) if s not in window]
        if rest:
            cor = _cor_between(state, bc, rest, restarts, seed)
            premises.append(Comparison.make("cor_center_rest_below_info_bound", "Cor(B_C:R)",
                                            cor.lower_bound, f"2^(-{ilabel})", 2.0 ** (-info),
                                            cor_upper=cor.upper_bound))
        else:
            notes.append("window covers the chain: R is empty")
        conclusions.append(Comparison.make("center_entropy_below_info", f"{tag}(B_C)", H(bc),
                                           ilabel, info))

    if not premises and not conclusions:
        raise InvalidRegion("geometry defines neither X|Y|Z nor a window")
    return ProofChainRecord(variant, asdict(geometry), premises, conclusions, float(epsilon),
                            xi, naive, notes)
