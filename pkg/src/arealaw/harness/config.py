"""Run configuration: JSON schema, validation, defaults and state construction.

A config file looks like::

    {"model": "tfim", "params": {"num_sites": 14, "h": 2.0},
     "seed": 0, "options": {"separations": [1, 2, 3, 4]}}

``options`` holds subcommand settings; unset keys take the defaults in
``DEFAULT_OPTIONS``.
"""
from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema

from ..errors import ConfigError
from .. import states

MODELS = ("tfim", "xy_random", "ghz", "entangled_pair_chain", "product", "haar",
          "haar_tripartite", "random_mps")

_int = {"type": "integer", "minimum": 0}
_pos = {"type": "integer", "minimum": 1}
_num = {"type": "number"}
_boundary = {"enum": ["line", "ring"]}
_int_list = {"type": "array", "items": _pos}

_MODEL_PARAMS = {
    "tfim": ({"num_sites": _pos, "h": _num, "boundary": _boundary}, ["num_sites", "h"]),
    "xy_random": ({"num_sites": _pos, "disorder_strength": {"type": "number", "minimum": 0},
                   "boundary": _boundary, "seed": _int}, ["num_sites", "disorder_strength"]),
    "ghz": ({"n": _pos}, ["n"]),
    "entangled_pair_chain": ({"n_pairs": _pos}, ["n_pairs"]),
    "product": ({"n": _pos}, ["n"]),
    "haar": ({"n": _pos, "seed": _int}, ["n"]),
    "haar_tripartite": ({"nA": _pos, "nB": _pos, "nC": _pos, "seed": _int}, ["nA", "nB", "nC"]),
    "random_mps": ({"n": _pos, "D": _pos, "seed": _int}, ["n", "D"]),
}

SCHEMA = {
    "type": "object",
    "required": ["model"],
    "properties": {
        "command": {"type": "string"},
        "model": {"enum": list(MODELS)},
        "params": {"type": "object"},
        "seed": _int,
        "output_dir": {"type": "string"},
        "workers": _pos,
        "options": {
            "type": "object",
            "properties": {
                "x_size": _pos, "y_size": _pos, "separations": _int_list,
                "restarts": _pos, "tol": {"type": "number", "exclusiveMinimum": 0},
                "block_sizes": _int_list, "start": _int, "max_entropy_epsilon": _num,
                "epsilon": {"type": "number", "minimum": 0}, "site": _int, "l0": _pos,
                "variant": {"enum": ["von_neumann", "single_shot"]},
                "smoothing_epsilon": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                "xi": {"type": ["number", "null"]},
                "geometry": {"type": "object", "properties": {
                    "xyz": {"type": "array", "items": _pos, "minItems": 3, "maxItems": 3},
                    "xyz_start": _int, "window_start": _int, "window_l": _pos}},
                "split": {"type": "array", "items": _pos, "minItems": 3, "maxItems": 3},
                "copies": {"type": "array", "items": {"enum": [1, 2, 3]}},
                "outcome_samples": _pos, "mode": {"enum": ["born", "exhaustive"]},
                "k": _pos, "d_values": _int_list,
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"model": {"const": m}}, "required": ["model"]},
         "then": {"required": ["params"],
                  "properties": {"params": {"type": "object", "properties": props,
                                            "required": req}}}}
        for m, (props, req) in _MODEL_PARAMS.items()
    ],
}

DEFAULT_OPTIONS = {
    "cor-profile": {"x_size": 1, "y_size": 1, "separations": None, "restarts": 16, "tol": 1e-9},
    "entropy-profile": {"block_sizes": None, "start": 0, "max_entropy_epsilon": None},
    "saturation-scan": {"epsilon": 1.0, "site": 0, "l0": 1},
    "proof-chain": {"variant": "von_neumann", "smoothing_epsilon": 0.0, "xi": None, "geometry": None,
                    "restarts": 8},
    "merge-sim": {"split": None, "copies": None, "outcome_samples": 50, "mode": "born"},
    "mps-compress": {"k": 2, "d_values": [1, 2, 4, 8, 16]},
}


def _field_path(err: jsonschema.ValidationError) -> str:
    path = ".".join(str(p) for p in err.absolute_path)
    if err.validator == "required":
        missing = err.message.split("'")[1]
        return f"{path}.{missing}" if path else missing
    return path or "<root>"


def validate(raw: dict) -> None:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    v = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(v.iter_errors(raw), key=lambda e: (len(e.absolute_path), str(e.absolute_path)))
    if errors:
        e = errors[0]
        field = _field_path(e)
        if e.validator == "required":
            raise ConfigError(f"missing required field '{field}'")
        raise ConfigError(f"invalid field '{field}': {e.message}")


def load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    validate(raw)
    return raw


def resolve(raw: dict, command: str, seed: int | None = None, out: str | None = None) -> dict:
    """Fill defaults and apply command-line overrides; the result is what gets recorded."""
    if command not in DEFAULT_OPTIONS:
        raise ConfigError(f"unknown subcommand {command!r}")
    cfg = copy.deepcopy(raw)
    validate(cfg)
    cfg["command"] = command
    cfg["seed"] = int(seed if seed is not None else cfg.get("seed", 0))
    cfg["output_dir"] = out or cfg.get("output_dir") or "arealaw_out"
    opts = dict(DEFAULT_OPTIONS[command])
    opts.update(cfg.get("options") or {})
    cfg["options"] = opts
    params = dict(cfg.get("params") or {})
    if cfg["model"] in ("xy_random", "haar", "haar_tripartite", "random_mps"):
        params.setdefault("seed", cfg["seed"])
    cfg["params"] = params
    return cfg


def build_state(cfg: dict):
    """Construct the configured state; returns (PureState, extra info dict)."""
    m, p = cfg["model"], cfg["params"]
    if m in ("tfim", "xy_random"):
        spec = states.HamiltonianSpec(
            m, p["num_sites"], h=float(p.get("h", 0.0)),
            disorder_strength=float(p.get("disorder_strength", 0.0)),
            seed=p.get("seed"), boundary=p.get("boundary", "line"))
        gs = states.ground_state(spec)
        info = {"energy": gs.energy, "residual_norm": gs.residual_norm,
                "gap_estimate": gs.gap_estimate, "degenerate": gs.degenerate,
                "iterations": gs.iterations}
        if m == "xy_random":
            info.update(couplings=list(gs.couplings), disorder_law=gs.disorder_law)
        return gs.state, info
    if m == "ghz":
        return states.ghz(p["n"]), {}
    if m == "entangled_pair_chain":
        return states.entangled_pair_chain(p["n_pairs"]), {}
    if m == "product":
        return states.product_state(p["n"]), {}
    if m == "haar":
        return states.haar_random_state(p["n"], p["seed"]), {}
    if m == "haar_tripartite":
        return states.haar_random_tripartite(p["nA"], p["nB"], p["nC"], p["seed"]), {}
    from ..mps import mps_to_dense
    return mps_to_dense(states.random_mps(p["n"], p["D"], p["seed"]), normalize=True), {}
