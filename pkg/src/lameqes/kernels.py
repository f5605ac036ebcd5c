"""Backend selection for the monodromy kernel.

The compiled extension is used when it was built; otherwise the NumPy
fallback is imported.  Both expose ``propagate(vnodes, h, energies)``.
"""
from __future__ import annotations

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

BACKEND = "compiled" if _compiled is not None else "python"
propagate = BACKENDS[BACKEND].propagate


def get_backend(name: str | None = None):
    """Kernel module by name (``"compiled"`` or ``"python"``), default the active one."""
    name = BACKEND if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
