"""Execution engine selection: compiled kernel when built, else pure Python.

Set ``GPSYNTH_PURE=1`` to force the pure-Python kernel (used by the
benchmark and the differential tests).
"""

from __future__ import annotations

import os

from . import _pykernel

if os.environ.get("GPSYNTH_PURE") == "1":
    kernel = _pykernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[no-redef]
    except ImportError:
        kernel = _pykernel

COMPILED = bool(getattr(kernel, "COMPILED", False))


def pick(compiled: bool | None = None):
    """The kernel module to use; ``compiled`` overrides auto-selection."""
    if compiled is None:
        return kernel
    if compiled:
        from . import _kernel  # raises if the extension is not built

        return _kernel
    return _pykernel


def make_executor(pinst, compiled: bool | None = None):
    """Executor for one packed instance; ``compiled`` overrides selection."""
    return pick(compiled).Executor(pinst)
