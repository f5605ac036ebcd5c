# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 propagation of ``psi'' = (V - E) psi`` over one period."""
import numpy as np


cdef inline void _rhs(double q, double y, double dy, double u, double du,
                      double *ky, double *kdy, double *ku, double *kdu) noexcept nogil:
    # q = V - E; u = d(psi)/dE obeys u'' = q u - psi
    ky[0] = dy
    kdy[0] = q * y
    ku[0] = du
    kdu[0] = q * u - y


cdef void _propagate(const double[::1] vnodes, double h, double energy,
                     double y0, double dy0, double *out) noexcept nogil:
    cdef Py_ssize_t steps = (vnodes.shape[0] - 1) // 2
    cdef Py_ssize_t k
    cdef double y = y0, dy = dy0, u = 0.0, du = 0.0
    cdef double q0, qh, q1, hh = 0.5 * h, h6 = h / 6.0
    cdef double k1y, k1dy, k1u, k1du, k2y, k2dy, k2u, k2du
    cdef double k3y, k3dy, k3u, k3du, k4y, k4dy, k4u, k4du
    for k in range(steps):
        q0 = vnodes[2 * k] - energy
        qh = vnodes[2 * k + 1] - energy
        q1 = vnodes[2 * k + 2] - energy
        _rhs(q0, y, dy, u, du, &k1y, &k1dy, &k1u, &k1du)
        _rhs(qh, y + hh * k1y, dy + hh * k1dy, u + hh * k1u, du + hh * k1du,
             &k2y, &k2dy, &k2u, &k2du)
        _rhs(qh, y + hh * k2y, dy + hh * k2dy, u + hh * k2u, du + hh * k2du,
             &k3y, &k3dy, &k3u, &k3du)
        _rhs(q1, y + h * k3y, dy + h * k3dy, u + h * k3u, du + h * k3du,
             &k4y, &k4dy, &k4u, &k4du)
        y += h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        dy += h6 * (k1dy + 2.0 * k2dy + 2.0 * k3dy + k4dy)
        u += h6 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        du += h6 * (k1du + 2.0 * k2du + 2.0 * k3du + k4du)
    out[0] = y
    out[1] = dy
    out[2] = u
    out[3] = du


def propagate(const double[::1] vnodes, double h, energies):
    """Monodromy entries and trace derivative for each energy.

    ``vnodes`` holds the potential at ``x = k h / 2``, ``k = 0 .. 2 steps``.
    Returns an ``(len(energies), 5)`` array with columns
    ``m11, m12, m21, m22, d(trace)/dE``.
    """
    cdef double[::1] es = np.ascontiguousarray(energies, dtype=np.float64).ravel()
    cdef Py_ssize_t n = es.shape[0], i
    result = np.empty((n, 5), dtype=np.float64)
    cdef double[:, ::1] res = result
    cdef double a[4]
    cdef double b[4]
    with nogil:
        for i in range(n):
            _propagate(vnodes, h, es[i], 1.0, 0.0, a)
            _propagate(vnodes, h, es[i], 0.0, 1.0, b)
            res[i, 0] = a[0]
            res[i, 1] = b[0]
            res[i, 2] = a[1]
            res[i, 3] = b[1]
            res[i, 4] = a[2] + b[3]
    return result
