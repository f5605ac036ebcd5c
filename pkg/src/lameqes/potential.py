"""The associated Lamé potential on the real line."""
from __future__ import annotations

import numpy as np

from .elliptic import jacobi_arrays
from .qes import PotentialParams

__all__ = ["potential_value"]


def potential_value(x, p: PotentialParams):
    """``a(a+1) m sn^2 + b(b+1) m cn^2/dn^2 + shift`` (scalar or array ``x``)."""
    sn, cn, dn = jacobi_arrays(x, p.m)
    ca = float(p.a * (p.a + 1)) * p.m
    cb = float(p.b * (p.b + 1)) * p.m
    v = ca * sn * sn + cb * (cn * cn) / (dn * dn) + p.shift
    return float(v) if np.ndim(v) == 0 else v
