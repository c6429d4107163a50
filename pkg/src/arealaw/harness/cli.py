"""``arealaw <subcommand> --config path.json [--seed N] [--out dir]``

Exit codes: 0 success, 1 computation failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys

from ..errors import ComputeError, ConfigError
from .config import load_config, resolve
from .pipeline import SUBCOMMANDS, run_pipeline


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arealaw",
                                description="Entanglement and correlation experiments on spin chains.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="JSON run configuration")
        s.add_argument("--seed", type=int, default=None, help="override the master seed")
        s.add_argument("--out", default=None, help="output directory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(load_config(args.config), args.command, args.seed, args.out)
        result = run_pipeline(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ComputeError as exc:
        print(f"compute error: {exc}", file=sys.stderr)
        return 1
    for f in result.files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
