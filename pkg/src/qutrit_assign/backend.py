"""Selection of the weight-kernel backend.

The compiled extension is preferred when it imported cleanly; the NumPy
fallback is always available.  The choice can be forced with the
environment variable ``QUTRIT_ASSIGN_BACKEND`` (``cython`` | ``python``)
or programmatically with :func:`set_backend`.

Both backends evaluate the same arithmetic; results may differ in the
last few ulps (libm vs NumPy transcendentals) but are bit-stable within
one backend, which is what the determinism guarantees refer to.
"""

from __future__ import annotations

import os

from . import _weights_py

try:
    from . import _weights_cy
except ImportError:
    _weights_cy = None

_BACKENDS = {"python": _weights_py}
if _weights_cy is not None:
    _BACKENDS["cython"] = _weights_cy

_forced: str | None = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def set_backend(name: str | None) -> None:
    """Force a backend by name, or restore automatic selection (None)."""
    global _forced
    if name is not None and name not in _BACKENDS:
        raise ValueError(
            f"backend {name!r} not available; have {available_backends()}"
        )
    _forced = name


def get_backend(name: str | None = None):
    """Resolve the kernel module: explicit name > set_backend >
    QUTRIT_ASSIGN_BACKEND > compiled-if-available."""
    if name is None:
        name = _forced
    if name is None:
        name = os.environ.get("QUTRIT_ASSIGN_BACKEND")
    if name is not None:
        if name not in _BACKENDS:
            raise ValueError(
                f"backend {name!r} not available; have {available_backends()}"
            )
        return _BACKENDS[name]
    return _BACKENDS.get("cython", _weights_py)
