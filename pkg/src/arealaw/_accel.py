"""Numba switch.

Set ``EDC_DISABLE_JIT=1`` to force the pure-numpy kernels even when numba
is importable.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

HAS_NUMBA = numba is not None
JIT_DISABLED = os.environ.get("EDC_DISABLE_JIT", "0").lower() not in ("", "0", "false", "no")
USE_NUMBA = HAS_NUMBA and not JIT_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is available, identity decorator otherwise."""
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)

    def deco(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return deco
