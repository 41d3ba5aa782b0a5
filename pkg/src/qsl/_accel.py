"""Backend switch for the compiled kernels.

Numba is used when it is importable and ``QSL_NUMBA`` is not one of
``0/false/no/off``. The flag is read once, at import time.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

_FLAG = os.environ.get("QSL_NUMBA", "1").strip().lower()

ENABLED = numba is not None and _FLAG not in {"0", "false", "no", "off"}
BACKEND = "numba" if ENABLED else "numpy"


def njit(func):
    if ENABLED:
        return numba.njit(cache=True)(func)
    return func
