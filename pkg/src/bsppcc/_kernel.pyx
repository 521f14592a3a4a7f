# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluation of the null statistic."""
import numpy as np

from libc.math cimport sqrt, NAN
from libc.stdlib cimport malloc, free


cdef double _row_statistic(double* z, const double* q, double* root, Py_ssize_t n,
                           double half_alpha) noexcept nogil:
    cdef Py_ssize_t i
    cdef double w, h, t, v, su = 0.0, sv = 0.0
    cdef double mu, mv, du, dv, sxx = 0.0, syy = 0.0, sxy = 0.0

    # z[i] becomes u = t, root[i] = sqrt(t)
    for i in range(n):
        w = half_alpha * z[i]
        h = sqrt(w * w + 1.0)
        if w >= 0.0:
            root[i] = w + h
        else:
            root[i] = 1.0 / (h - w)
        t = root[i] * root[i]
        z[i] = t
        su += t
        sv += root[i] * q[i]
    mu = su / n
    mv = sv / n
    for i in range(n):
        du = z[i] - mu
        dv = root[i] * q[i] - mv
        sxx += du * du
        syy += dv * dv
        sxy += du * dv
    if sxx == 0.0 or syy == 0.0:
        return NAN
    return sxy / sqrt(sxx * syy)


def null_statistics(double[:, ::1] z, double alpha, const double[::1] q):
    """Correlation statistic for each row of standard normal draws.

    Rows of ``z`` are sorted and overwritten in place. Sorting is left to
    numpy, whose vectorised row sort beats a per-row ``std::sort`` by ~10x.
    """
    np.asarray(z).sort(axis=1)
    cdef Py_ssize_t m = z.shape[0], n = z.shape[1], k
    if q.shape[0] != n:
        raise ValueError("q must have one entry per column of z")
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef double half_alpha = 0.5 * alpha
    cdef double* root = <double*> malloc(n * sizeof(double))
    if root == NULL:
        raise MemoryError()
    try:
        with nogil:
            for k in range(m):
                res[k] = _row_statistic(&z[k, 0], &q[0], root, n, half_alpha)
    finally:
        free(root)
    return out
