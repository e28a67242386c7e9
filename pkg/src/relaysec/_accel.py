"""Numba detection and backend selection.

Set ``RELAYSEC_BACKEND=numpy`` (or ``RELAYSEC_DISABLE_NUMBA=1``) before import
to force the pure-numpy kernels even when numba is installed.
"""

import logging
import os

logger = logging.getLogger(__name__)

_requested = os.environ.get("RELAYSEC_BACKEND", "").strip().lower()
_disabled = os.environ.get("RELAYSEC_DISABLE_NUMBA", "").strip() not in ("", "0")

if _requested not in ("", "numba", "numpy"):
    raise ImportError(f"RELAYSEC_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _disabled and _requested != "numpy"

if _requested == "numba" and not HAVE_NUMBA:  # pragma: no cover
    logger.warning("RELAYSEC_BACKEND=numba requested but numba is not importable")


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)

    def wrap(func):
        return func

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return wrap


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
