"""Switch between numba-compiled kernels and the pure-numpy fallbacks.

Set ``BITCONG_DISABLE_NUMBA=1`` (or have numba missing) to force the numpy path.
"""

import os

_disabled = os.environ.get("BITCONG_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _disabled:
        raise ImportError("numba disabled by BITCONG_DISABLE_NUMBA")
    import numba as nb

    HAVE_NUMBA = True
    njit = nb.njit(cache=True, nogil=True)
except ImportError:
    nb = None
    HAVE_NUMBA = False

    def njit(fn):
        return fn


USE_NUMBA = HAVE_NUMBA


def set_backend(name):
    """Select "numba" or "numpy" at runtime; returns the previous backend name."""
    global USE_NUMBA
    prev = backend()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        USE_NUMBA = True
    elif name == "numpy":
        USE_NUMBA = False
    else:
        raise ValueError(f"unknown backend {name!r}")
    return prev


def backend():
    return "numba" if USE_NUMBA else "numpy"
