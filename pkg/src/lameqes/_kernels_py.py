"""Pure-Python/NumPy twin of the compiled RK4 kernel.

Same arithmetic in the same order as ``_kernels.pyx``.  Many energies are
propagated together as NumPy vectors; a handful are done with plain floats,
which is much cheaper than NumPy on length-one arrays.
"""
from __future__ import annotations

import numpy as np

_VECTOR_THRESHOLD = 8


def _propagate_scalar(vnodes, h, energy, y, dy):
    u = du = 0.0
    hh = 0.5 * h
    h6 = h / 6.0
    for k in range(0, len(vnodes) - 1, 2):
        q0 = vnodes[k] - energy
        qh = vnodes[k + 1] - energy
        q1 = vnodes[k + 2] - energy
        k1y, k1dy, k1u, k1du = dy, q0 * y, du, q0 * u - y
        y2, dy2, u2, du2 = y + hh * k1y, dy + hh * k1dy, u + hh * k1u, du + hh * k1du
        k2y, k2dy, k2u, k2du = dy2, qh * y2, du2, qh * u2 - y2
        y3, dy3, u3, du3 = y + hh * k2y, dy + hh * k2dy, u + hh * k2u, du + hh * k2du
        k3y, k3dy, k3u, k3du = dy3, qh * y3, du3, qh * u3 - y3
        y4, dy4, u4, du4 = y + h * k3y, dy + h * k3dy, u + h * k3u, du + h * k3du
        k4y, k4dy, k4u, k4du = dy4, q1 * y4, du4, q1 * u4 - y4
        y += h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        dy += h6 * (k1dy + 2.0 * k2dy + 2.0 * k3dy + k4dy)
        u += h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        du += h6 * (k1du + 2.0 * k2du + 2.0 * k3du + k4du)
    return y, dy, u, du


def _propagate_vector(vnodes, h, energies, y0, dy0):
    n = energies.shape[0]
    y = np.full(n, y0)
    dy = np.full(n, dy0)
    u = np.zeros(n)
    du = np.zeros(n)
    hh = 0.5 * h
    h6 = h / 6.0
    for k in range(0, len(vnodes) - 1, 2):
        q0 = vnodes[k] - energies
        qh = vnodes[k + 1] - energies
        q1 = vnodes[k + 2] - energies
        k1y, k1dy, k1u, k1du = dy, q0 * y, du, q0 * u - y
        y2, dy2, u2, du2 = y + hh * k1y, dy + hh * k1dy, u + hh * k1u, du + hh * k1du
        k2y, k2dy, k2u, k2du = dy2, qh * y2, du2, qh * u2 - y2
        y3, dy3, u3, du3 = y + hh * k2y, dy + hh * k2dy, u + hh * k2u, du + hh * k2du
        k3y, k3dy, k3u, k3du = dy3, qh * y3, du3, qh * u3 - y3
        y4, dy4, u4, du4 = y + h * k3y, dy + h * k3dy, u + h * k3u, du + h * k3du
        k4y, k4dy, k4u, k4du = dy4, q1 * y4, du4, q1 * u4 - y4
        y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        dy = dy + h6 * (k1dy + 2.0 * k2dy + 2.0 * k3dy + k4dy)
        u = u + h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        du = du + h6 * (k1du + 2.0 * k2du + 2.0 * k3du + k4du)
    return y, dy, u, du


def propagate(vnodes, h, energies):
    """See :func:`lameqes._kernels.propagate`."""
    es = np.ascontiguousarray(energies, dtype=float).ravel()
    out = np.empty((es.shape[0], 5))
    if es.shape[0] < _VECTOR_THRESHOLD:
        nodes = np.asarray(vnodes, dtype=float).tolist()
        for i, e in enumerate(es.tolist()):
            a = _propagate_scalar(nodes, h, e, 1.0, 0.0)
            b = _propagate_scalar(nodes, h, e, 0.0, 1.0)
            out[i] = (a[0], b[0], a[1], b[1], a[2] + b[3])
        return out
    nodes = np.asarray(vnodes, dtype=float)
    a = _propagate_vector(nodes, h, es, 1.0, 0.0)
    b = _propagate_vector(nodes, h, es, 0.0, 1.0)
    out[:, 0] = a[0]
    out[:, 1] = b[0]
    out[:, 2] = a[1]
    out[:, 3] = b[1]
    out[:, 4] = a[2] + b[3]
    return out
