"""Selects the closed-loop integration kernel at import time.

The compiled extension is preferred when it imported cleanly; the numpy
fallback is always available. ``get_kernel`` resolves the user-facing
backend names.
"""

from __future__ import annotations

from types import ModuleType

from . import _kernel_py

try:
    from . import _kernel  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _kernel = None  # type: ignore[assignment]
    HAVE_COMPILED = False

DEFAULT_BACKEND = "compiled" if HAVE_COMPILED else "python"


def available_backends() -> tuple[str, ...]:
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def get_kernel(backend: str = "auto") -> ModuleType:
    """Resolve a backend name to its kernel module.

    ``auto`` picks the compiled kernel when present. Requesting
    ``compiled`` without the built extension raises.
    """
    if backend == "auto":
        backend = DEFAULT_BACKEND
    if backend == "python":
        return _kernel_py
    if backend == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError(
                "compiled kernel requested but the extension is not built; "
                "reinstall with Cython and a C compiler available"
            )
        return _kernel
    raise ValueError(f"unknown backend {backend!r}; expected auto, compiled, or python")
