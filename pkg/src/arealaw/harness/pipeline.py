"""Subcommand implementations and the artifact writer."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .. import __version__, _accel
from ..correlations import decay_profile, fit_correlation_length
from ..entropies import SmoothingSpec, region_entropy, region_max_entropy
from ..errors import ArealawError, ComputeError, ConfigError
from ..merging import merging_trend
from ..mps import bond_entropies, corollary1_check, dense_to_mps
from .analysis import ChainGeometry, proof_chain_report, saturation_scan
from .config import build_state, resolve
from .output import write_csv, write_json, write_svg
from .workers import num_workers, pool_map

SUBCOMMANDS = ("cor-profile", "entropy-profile", "saturation-scan", "proof-chain", "merge-sim",
               "mps-compress")
TOOL_NAME = "arealaw"


@dataclass
class Artifact:
    header: list
    rows: list
    record: dict
    plot: dict = field(default_factory=dict)


@dataclass
class PipelineResult:
    exit_code: int
    files: list
    record: dict


def _log2(values):
    return [float(np.log2(v)) if v > 0 else float("nan") for v in values]


def _default_separations(n, boundary, x, y):
    top = (n - x - y) // 2 if boundary == "ring" else n - x - y
    return list(range(1, top + 1))


def _cor_profile(state, cfg, mapper):
    o = cfg["options"]
    seps = o["separations"] or _default_separations(state.num_sites, state.boundary,
                                                     o["x_size"], o["y_size"])
    prof = decay_profile(state, o["x_size"], o["y_size"], seps, restarts=o["restarts"],
                         tol=o["tol"], seed=cfg["seed"], map_fn=mapper)
    rows = [(l, e.lower_bound, e.upper_bound) for l, e in prof]
    try:
        fit = fit_correlation_length(prof)
        fit_rec = {"xi": fit.xi, "intercept": fit.intercept, "residual": fit.residual,
                   "points": fit.points}
    except (ArealawError, ValueError) as exc:
        fit_rec = {"xi": None, "reason": str(exc)}
    ls = [r[0] for r in rows]
    return Artifact(
        ["l", "cor_lower", "cor_upper"], rows,
        {"fit": fit_rec, "profile": [{"l": l, "lower": lo, "upper": up,
                                      "converged": e.converged}
                                     for (l, lo, up), (_, e) in zip(rows, prof)]},
        {"series": {"log2 cor_lower": (ls, _log2([r[1] for r in rows])),
                    "log2 cor_upper": (ls, _log2([r[2] for r in rows]))},
         "title": "Correlation decay", "xlabel": "separation l", "ylabel": "log2 Cor"})


def _block(state, start, size):
    n = state.num_sites
    idx = [start + i for i in range(size)]
    if state.boundary == "ring":
        return [i % n for i in idx]
    if idx[-1] >= n:
        raise ConfigError(f"block of {size} sites at {start} leaves the chain")
    return idx


def _entropy_profile(state, cfg, mapper):
    o = cfg["options"]
    n = state.num_sites
    sizes = o["block_sizes"] or list(range(1, n // 2 + 1))
    eps = o["max_entropy_epsilon"]

    def one(b):
        sites = _block(state, o["start"], b)
        row = [b, region_entropy(state, sites)]
        if eps is not None:
            row.append(region_max_entropy(state, sites, SmoothingSpec(eps)))
        return tuple(row)

    rows = mapper(one, sizes)
    header = ["block_size", "H_bits"] + (["H_max_bits"] if eps is not None else [])
    series = {"H": (sizes, [r[1] for r in rows])}
    if eps is not None:
        series["H_max"] = (sizes, [r[2] for r in rows])
    return Artifact(header, rows, {"start": o["start"], "smoothing_epsilon": eps},
                    {"series": series, "title": "Block entropy", "xlabel": "block size",
                     "ylabel": "bits"})


def _saturation(state, cfg, mapper):
    o = cfg["options"]
    res = saturation_scan(state, o["epsilon"], o["site"], o["l0"])
    rows = [(r["l"], r["start"], r["I_bits"], o["epsilon"] * r["l"],
             r["I_bits"] <= o["epsilon"] * r["l"]) for r in res.inspected]
    idx = list(range(len(rows)))
    return Artifact(["l", "start", "I_bits", "threshold", "qualifies"], rows, res.to_dict(),
                    {"series": {"I(B_C:B_L B_R)": (idx, [r[2] for r in rows]),
                                "epsilon l": (idx, [r[3] for r in rows])},
                     "title": "Saturation scan", "xlabel": "inspection index",
                     "ylabel": "bits"})


def _geometry(state, cfg):
    g = cfg["options"]["geometry"] or {}
    parts = {}
    xyz = g.get("xyz")
    if xyz is None and state.partition is not None and len(state.partition) == 3:
        xyz = list(state.partition)
    if xyz is not None:
        parts.update(vars(ChainGeometry.blocks(*xyz, start=g.get("xyz_start", 0))))
    if "window_l" in g:
        w = ChainGeometry.from_window(state.num_sites, g.get("window_start", 0), g["window_l"],
                                      state.boundary)
        parts.update(b_left=w.b_left, b_center=w.b_center, b_right=w.b_right)
    if not parts:
        raise ConfigError("missing required field 'options.geometry'")
    for key in ("x", "y", "z"):
        if any(s >= state.num_sites for s in parts.get(key, ())):
            raise ConfigError("options.geometry.xyz exceeds the chain length")
    return ChainGeometry(**parts)


def _proof_chain(state, cfg, mapper):
    o = cfg["options"]
    geom = _geometry(state, cfg)
    xi, xi_source = o["xi"], "config"
    if xi is None and geom.has_xyz:
        prof = decay_profile(state, 1, 1, _default_separations(state.num_sites, state.boundary,
                                                                1, 1),
                             restarts=4, seed=cfg["seed"], map_fn=mapper)
        try:
            xi, xi_source = fit_correlation_length(prof).xi, "fitted single-site profile"
        except (ArealawError, ValueError) as exc:
            xi, xi_source = None, f"fit failed: {exc}"
    rec = proof_chain_report(state, geom, o["variant"], o["smoothing_epsilon"], xi, o["restarts"],
                             cfg["seed"])
    d = rec.to_dict()
    d["xi_source"] = xi_source
    comps = [("premise", c) for c in rec.premises] + [("conclusion", c) for c in rec.conclusions]
    rows = [(k, c.name, c.lhs_label, c.lhs, c.rhs_label, c.rhs, c.holds) for k, c in comps]
    idx = list(range(len(rows)))
    return Artifact(["kind", "name", "lhs_label", "lhs", "rhs_label", "rhs", "holds"], rows, d,
                    {"series": {"lhs": (idx, [r[3] for r in rows]),
                                "rhs": (idx, [r[5] for r in rows])},
                     "title": f"Proof chain ({o['variant']})", "xlabel": "comparison index",
                     "ylabel": "value"})


def _merge(state, cfg, mapper):
    o = cfg["options"]
    split = o["split"] or (list(state.partition) if state.partition else None)
    if split is None:
        raise ConfigError("missing required field 'options.split'")
    if sum(split) != state.num_sites:
        raise ConfigError("options.split must sum to the number of sites")
    copies = o["copies"] or ([1, 2] if 2 * state.num_sites <= 16 else [1])
    stats = merging_trend(state, tuple(split), tuple(copies), o["outcome_samples"],
                          cfg["seed"], o["mode"])
    keys = ["copies", "num_outcomes", "mutual_information", "distillation_rate",
            "mean_decoupling_error", "median_decoupling_error", "mean_decoupling_error_pre",
            "mean_entangled_fraction", "median_entangled_fraction", "mean_ebits"]
    rows = [tuple(s.summary()[k] for k in keys) for s in stats]
    cs = [r[0] for r in rows]
    return Artifact(keys, rows, {"split": split, "statistics": [s.summary() for s in stats]},
                    {"series": {"mean decoupling error": (cs, [r[4] for r in rows]),
                                "mean entangled fraction": (cs, [r[7] for r in rows])},
                     "title": "Merging", "xlabel": "copies n", "ylabel": "value"})


def _mps(state, cfg, mapper):
    o = cfg["options"]
    table = corollary1_check(state, o["k"], o["d_values"])
    keys = ["D", "max_trace_distance", "worst_region_start", "worst_region_length",
            "global_error_bound", "max_bond_dim"]
    rows = [tuple(r[k] for k in keys) for r in table.rows]
    mps, _ = dense_to_mps(state, cut_ring=True)
    ds = [r[0] for r in rows]
    return Artifact(keys, rows, {"k": table.k, "monotone": table.monotone, "rows": table.rows,
                                 "bond_entropies": bond_entropies(mps)},
                    {"series": {"log10 max trace distance":
                                (ds, [np.log10(r[1]) if r[1] > 0 else float("nan")
                                      for r in rows])},
                     "title": "Local marginal error after truncation", "xlabel": "bond dim D",
                     "ylabel": "log10 error"})


_DISPATCH = {"cor-profile": _cor_profile, "entropy-profile": _entropy_profile,
             "saturation-scan": _saturation, "proof-chain": _proof_chain, "merge-sim": _merge,
             "mps-compress": _mps}


def run_pipeline(cfg: dict) -> PipelineResult:
    """Run one resolved config and write ``<command>.csv/.json/.svg`` plus ``run.json``.

    Raises ConfigError for bad input and ComputeError when a computation fails.
    """
    cmd = cfg.get("command")
    if cmd not in _DISPATCH:
        raise ConfigError(f"unknown subcommand {cmd!r}")
    out = Path(cfg["output_dir"])
    workers = num_workers(cfg.get("workers"))
    mapper = partial(pool_map, workers=workers)
    try:
        state, info = build_state(cfg)
        art = _DISPATCH[cmd](state, cfg, mapper)
    except ConfigError:
        raise
    except (ArealawError, ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise ComputeError(f"{cmd} failed: {type(exc).__name__}: {exc}") from exc

    out.mkdir(parents=True, exist_ok=True)
    stem = cmd.replace("-", "_")
    files = [write_csv(out / f"{stem}.csv", art.header, art.rows),
             write_json(out / f"{stem}.json", {"command": cmd, "state": info, **art.record})]
    if art.plot:
        files.append(write_svg(out / f"{stem}.svg", art.plot["series"], art.plot["title"],
                               art.plot["xlabel"], art.plot["ylabel"]))
    run = {"tool": TOOL_NAME, "version": __version__, "config": cfg,
           "seeds": {"master": cfg["seed"], "state": cfg["params"].get("seed"),
                     "analysis": cfg["seed"]},
           "numba": _accel.USE_NUMBA, "workers": workers,
           "files": [p.name for p in files]}
    files.append(write_json(out / "run.json", run))
    return PipelineResult(0, files, art.record)


def run_command(command: str, raw: dict, seed=None, out=None) -> PipelineResult:
    return run_pipeline(resolve(raw, command, seed, out))
