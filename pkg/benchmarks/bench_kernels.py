"""Time the numba and numpy kernel paths on spin-chain Hamiltonians.

    python3 benchmarks/bench_kernels.py [--sites 12 14 16] [--repeat 20]

Prints one row per (model, n, kernel) with the best wall time in ms and the
numba speedup. Both paths are checked against each other before timing.
"""
import argparse
import time

import numpy as np

from arealaw import _accel, kernels
from arealaw.states import HamiltonianSpec, ground_state, spin_operator


def best_of(fn, repeat):
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times) * 1e3


def bench(model, n, repeat):
    w = 0.5 if model == "xy_random" else 0.0
    spec = HamiltonianSpec(model, n, h=1.0, disorder_strength=w, seed=0)
    op = spin_operator(spec, use_numba=False)
    v = np.random.default_rng(0).standard_normal(2 ** n)
    left = np.arange(n - 1)
    right = left + 1
    coeffs = np.ones(n - 1)
    assert np.allclose(op.matvec(v, use_numba=True), op.matvec(v, use_numba=False))
    rows = []
    for name, fn in (
        ("matvec", lambda u: op.matvec(v, use_numba=u)),
        ("diagonal", lambda u: kernels.bond_diagonal(n, left, right, coeffs, use_numba=u)),
    ):
        t_np = best_of(lambda: fn(False), repeat)
        t_nb = best_of(lambda: fn(True), repeat)
        rows.append((model, n, name, t_np, t_nb))
    t_np = best_of(lambda: ground_state(spec, use_numba=False), 1)
    t_nb = best_of(lambda: ground_state(spec, use_numba=True), 1)
    rows.append((model, n, "ground_state", t_np, t_nb))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sites", type=int, nargs="+", default=[10, 12, 14])
    p.add_argument("--repeat", type=int, default=20)
    args = p.parse_args(argv)
    if not _accel.HAS_NUMBA:
        print("numba not importable: both columns time the numpy path")
    print(f"{'model':<10}{'n':>4}  {'kernel':<13}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for model in ("tfim", "xy_random"):
        for n in args.sites:
            for m, nn, k, a, b in bench(model, n, args.repeat):
                print(f"{m:<10}{nn:>4}  {k:<13}{a:>11.3f}{b:>11.3f}{a / b:>9.2f}")


if __name__ == "__main__":
    main()
