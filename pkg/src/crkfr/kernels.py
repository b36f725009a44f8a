"""Kernel backend selection.

The per-element contractions that dominate a time step exist twice: a
compiled Cython extension (``crkfr._kernels``) and a numpy fallback
(``crkfr._kernels_py``).  The compiled version is preferred when the
extension built; ``CRKFR_BACKEND=python`` or ``=ext`` forces a choice.
Both backends compute the same quantities to floating-point accuracy; the
benchmark harness compares their speed.
"""

import os
from contextlib import contextmanager

from crkfr import _kernels_py

_requested = os.environ.get("CRKFR_BACKEND", "").strip().lower()

if _requested in ("", "ext", "compiled"):
    try:
        from crkfr import _kernels as _impl

        BACKEND = "ext"
    except ImportError:
        if _requested:
            raise ImportError(
                "CRKFR_BACKEND=ext requested but the compiled extension is not built"
            )
        _impl = _kernels_py
        BACKEND = "python"
elif _requested in ("python", "py"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    raise ValueError(f"unknown CRKFR_BACKEND value {_requested!r}")


def get_backend(name=None):
    """Return (backend_name, module); name=None yields the active default."""
    if name in (None, "auto"):
        return BACKEND, _impl
    if name in ("python", "py"):
        return "python", _kernels_py
    if name in ("ext", "compiled"):
        from crkfr import _kernels

        return "ext", _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


batched_diff = _impl.batched_diff
fr_residual = _impl.fr_residual


@contextmanager
def use_backend(name):
    """Temporarily switch the kernel implementation (for benchmarks/tests)."""
    global batched_diff, fr_residual
    saved = (batched_diff, fr_residual)
    _, impl = get_backend(name)
    batched_diff, fr_residual = impl.batched_diff, impl.fr_residual
    try:
        yield impl
    finally:
        batched_diff, fr_residual = saved
