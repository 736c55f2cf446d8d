"""Optional numba acceleration.

Set ``BAYESEVT_DISABLE_NUMBA=1`` before import to run every kernel through
its pure-numpy twin instead of the compiled loop.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and (
    os.environ.get("BAYESEVT_DISABLE_NUMBA", "").strip().lower() in _FALSY
)


def njit(func):
    """Compile ``func`` with ``numba.njit`` when numba is importable.

    The returned object is always the compiled version if numba exists, so
    benchmarks can compare it against the numpy path regardless of the
    environment flag. Dispatch between the two happens in ``kernels``.
    """
    if numba is None:
        return func
    return numba.njit(cache=True, fastmath=False)(func)
