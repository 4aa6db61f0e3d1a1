# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Hot loops: directed Hausdorff and min-distance kernels.

Distances are squared Euclidean, with optional per-coordinate unit
wraparound (flat torus / circle chart).  Callers convert sphere chord
values back to geodesic lengths.
"""

from libc.math cimport sqrt, fabs

import numpy as np


cdef inline double _sqdist(const double[:, ::1] a, Py_ssize_t i,
                           const double[:, ::1] b, Py_ssize_t j,
                           Py_ssize_t dim, bint wrap) nogil:
    cdef double s = 0.0, d
    cdef Py_ssize_t k
    for k in range(dim):
        d = fabs(a[i, k] - b[j, k])
        if wrap:
            d = d % 1.0
            if d > 0.5:
                d = 1.0 - d
        s += d * d
    return s


def directed_hausdorff(const double[:, ::1] a, const double[:, ::1] b,
                       bint wrap):
    """max over rows of a of the min distance to rows of b."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], dim = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double cmax = 0.0, cmin, d
    with nogil:
        for i in range(na):
            cmin = 1e300
            for j in range(nb):
                d = _sqdist(a, i, b, j, dim, wrap)
                if d < cmax:          # early exit: this row cannot raise the max
                    cmin = d
                    break
                if d < cmin:
                    cmin = d
            if cmin > cmax and cmin < 1e300:
                cmax = cmin
    return sqrt(cmax)


def min_distances(const double[:, ::1] a, const double[:, ::1] b, bint wrap):
    """min distance from each row of a to the rows of b (no early exit)."""
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0], dim = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double cmin, d
    out = np.empty(na, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(na):
            cmin = 1e300
            for j in range(nb):
                d = _sqdist(a, i, b, j, dim, wrap)
                if d < cmin:
                    cmin = d
            o[i] = sqrt(cmin)
    return out
