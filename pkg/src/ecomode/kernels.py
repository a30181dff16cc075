"""Select the compiled kernels when built, else the numpy fallback.

Set ``ECOMODE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from ecomode import _kernels_py

if os.environ.get("ECOMODE_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from ecomode import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

IMPLEMENTATION = _impl.IMPLEMENTATION
solve_rows = _impl.solve_rows
enumerate_min = _impl.enumerate_min


def available():
    """Implementations importable in this environment, by name."""
    impls = {"python": _kernels_py}
    try:
        from ecomode import _kernels
    except ImportError:
        pass
    else:
        impls["cython"] = _kernels
    return impls


def worker_count() -> int:
    """Worker cap from ``ECOMODE_THREADS``; 0 or unset means one per CPU."""
    raw = os.environ.get("ECOMODE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"ECOMODE_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"ECOMODE_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)
