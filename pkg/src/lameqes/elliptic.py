"""Jacobi elliptic functions and the complete elliptic integral of the first kind.

Everything here uses the *parameter* convention: ``m = k**2``, so that
``sn(x, m)`` matches the usual physics notation for the Lamé family.  Some
libraries (e.g. Boost, older Fortran codes) take the modulus ``k`` instead;
pass ``k**2`` when porting values from those.

Only ``0 <= m < 1`` is supported.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

__all__ = [
    "EllipticTriple",
    "agm",
    "check_modulus",
    "complete_K",
    "jacobi",
    "jacobi_arrays",
]

_EPS = np.finfo(float).eps
_MAX_AGM_ITER = 64


class EllipticTriple(NamedTuple):
    sn: float
    cn: float
    dn: float


def check_modulus(m) -> float:
    """Validate the elliptic parameter and return it as a float."""
    m = float(m)
    if not math.isfinite(m) or m < 0.0 or m >= 1.0:
        raise ValueError(f"elliptic parameter m must satisfy 0 <= m < 1, got {m!r}")
    return m


def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    for _ in range(_MAX_AGM_ITER):
        if abs(a - b) <= 2.0 * _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def complete_K(m: float) -> float:
    """Quarter period ``K(m) = pi / (2 * AGM(1, sqrt(1 - m)))``."""
    m = check_modulus(m)
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - m)))


def _landen_ladder(m: float) -> tuple[list[float], list[float]]:
    # Descending Gauss transformation: a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n),
    # c_{n+1} = (a_n - b_n)/2, stopped once c_N is below rounding.
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    avals, cvals = [a], [c]
    for _ in range(_MAX_AGM_ITER):
        if c <= _EPS * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        avals.append(a)
        cvals.append(c)
    return avals, cvals


def jacobi_arrays(x, m: float):
    """Vectorised ``(sn, cn, dn)`` for an array of real arguments.

    The argument is first reduced modulo the real period ``4K``; the
    amplitude is then recovered by the descending Landen recursion

        phi_{n-1} = (phi_n + asin((c_n / a_n) sin phi_n)) / 2,
        phi_N = 2**N a_N x,

    and ``sn = sin(phi_0)``, ``cn = cos(phi_0)``.  ``dn`` is formed as
    ``sqrt((1 - m) + m cn**2)``, which involves no cancellation anywhere
    on the real line (unlike ``cos(phi_0) / cos(phi_1 - phi_0)``, which is
    0/0 at ``x = K``).
    """
    m = check_modulus(m)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("jacobi: argument must be finite")
    period = 4.0 * complete_K(m)
    xr = x - period * np.round(x / period)

    avals, cvals = _landen_ladder(m)
    levels = len(avals) - 1
    phi = (2.0**levels) * avals[-1] * xr
    for n in range(levels, 0, -1):
        phi = 0.5 * (phi + np.arcsin(cvals[n] / avals[n] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt((1.0 - m) + m * cn * cn)
    return sn, cn, dn


def jacobi(x: float, m: float) -> EllipticTriple:
    """``(sn, cn, dn)`` at a single real argument ``x`` for parameter ``m``.

    >>> jacobi(0.0, 0.5)
    EllipticTriple(sn=0.0, cn=1.0, dn=1.0)
    """
    sn, cn, dn = jacobi_arrays(float(x), m)
    return EllipticTriple(float(sn), float(cn), float(dn))
