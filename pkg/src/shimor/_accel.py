"""Kernel backend selection.

Hot loops in ``_kernels`` are written as plain array code so that one
source serves two execution paths: numba-compiled (the default) and
interpreted NumPy/Python.  Set ``SHIMOR_DISABLE_NUMBA=1`` to force the
interpreted path; ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

_flag = os.environ.get("SHIMOR_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag in ("1", "true", "yes", "on")

if not NUMBA_DISABLED:
    try:
        from numba import njit as _numba_njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


if HAVE_NUMBA:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend():
    """Name of the active kernel path: 'numba' or 'numpy'."""
    return "numba" if HAVE_NUMBA else "numpy"
