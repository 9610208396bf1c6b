"""Numeric kernel backend selection.

Two interchangeable implementations of the hot kernels exist:

* ``_fast`` - a Cython extension compiled at install time;
* ``_ref``  - the pure-NumPy reference (also the normative definition of
  the per-example operation order).

At import the compiled backend is preferred when present.  The
``SLBFGS_BACKEND`` environment variable forces a choice: ``python`` (or
``ref``) selects the fallback, ``compiled`` (or ``fast``) requires the
extension and raises if it is missing.  ``set_backend`` rebinds the
module-level kernel names at runtime; callers that import this module (not
the individual names) pick up the switch, which is what the benchmark
uses to time both implementations in one process.
"""

from __future__ import annotations

import os

from . import _ref

_KERNEL_NAMES = [
    "ridge_value_dense",
    "ridge_grad_dense",
    "ridge_hvp_dense",
    "ridge_value_csr",
    "ridge_grad_csr",
    "ridge_hvp_csr",
    "hinge2_value_dense",
    "hinge2_grad_dense",
    "hinge2_hvp_dense",
    "hinge2_value_csr",
    "hinge2_grad_csr",
    "hinge2_hvp_csr",
    "mc_value",
    "mc_grad",
    "mc_hvp",
    "two_loop_apply",
]

try:
    from . import _fast
except ImportError:
    _fast = None

BACKEND = "python"


def available_backends() -> list[str]:
    out = ["python"]
    if _fast is not None:
        out.insert(0, "compiled")
    return out


def set_backend(name: str) -> str:
    """Bind the named backend's kernels to this module; returns the name."""
    global BACKEND
    if name in ("compiled", "fast", "c"):
        if _fast is None:
            raise RuntimeError("compiled kernel extension is not available")
        impl, BACKEND = _fast, "compiled"
    elif name in ("python", "ref", "py", "pure"):
        impl, BACKEND = _ref, "python"
    else:
        raise ValueError(f"unknown backend {name!r}")
    for fn in _KERNEL_NAMES:
        globals()[fn] = getattr(impl, fn)
    return BACKEND


_env = os.environ.get("SLBFGS_BACKEND", "").strip().lower()
if _env in ("", "auto"):
    set_backend("compiled" if _fast is not None else "python")
elif _env in ("compiled", "fast", "c", "python", "ref", "py", "pure"):
    set_backend(_env)
else:
    raise RuntimeError(
        f"SLBFGS_BACKEND={_env!r} not recognized; "
        "use 'auto', 'compiled', or 'python'"
    )
