"""Pick the run-loop backend at import time.

The compiled kernel is used when the extension was built; set
``CROWDCAP_BACKEND=python`` to force the pure-Python loop.
"""

from __future__ import annotations

import os

from .model import FilterKind

try:
    from . import _kernel as kernel
except ImportError:  # extension not built
    kernel = None

FILTER_CODES = {
    FilterKind.PASS_THROUGH: 0,
    FilterKind.THRESHOLD: 1,
    FilterKind.BEST_PER_TASK: 2,
}

HAVE_COMPILED = kernel is not None


def _default() -> str:
    want = os.environ.get("CROWDCAP_BACKEND", "").strip().lower()
    if want == "python":
        return "python"
    if want == "compiled" and not HAVE_COMPILED:
        raise ImportError("CROWDCAP_BACKEND=compiled but crowdcap._kernel is not built")
    return "compiled" if HAVE_COMPILED else "python"


DEFAULT = _default()


def resolve(name: str | None) -> str:
    if name is None:
        return DEFAULT
    if name not in ("python", "compiled"):
        raise ValueError(f"unknown backend {name!r}; expected 'python' or 'compiled'")
    if name == "compiled" and not HAVE_COMPILED:
        raise RuntimeError("compiled backend requested but crowdcap._kernel is not built")
    return name
