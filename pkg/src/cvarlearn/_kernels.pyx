# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled CVaR kernels.

Reference semantics live in ``cvarlearn._kernels_py``; the two backends must
agree to float round-off. Sorting is delegated to NumPy (its introsort beats
a comparator-based C qsort); the compiled code removes the per-call Python
and temporary-array overhead of the order-statistic scans.
"""

from libc.math cimport floor

import numpy as np

BACKEND = "cython"


def var_sorted(const double[::1] values, double alpha):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = n - <Py_ssize_t>floor(alpha * n)
    if m < 1:
        m = 1
    return values[m - 1]


def cvar_sorted(const double[::1] values, double alpha):
    cdef Py_ssize_t n = values.shape[0]
    cdef double an = alpha * n
    cdef double f = floor(an)
    cdef Py_ssize_t k = <Py_ssize_t>f if an == f else <Py_ssize_t>f + 1
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(n - k + 1, n):
        s += values[i]
    s += (an - (k - 1)) * values[n - k]
    return s / an


cdef inline double _tail_scan(const double* c, const double* w, Py_ssize_t q,
                              double alpha) noexcept nogil:
    # c, w sorted by descending cost; weights sum to ~1
    cdef double thresh = alpha * (1.0 - 1e-12)
    cdef double cum = 0.0
    cdef double acc = 0.0
    cdef Py_ssize_t i = 0
    while i < q - 1 and cum + w[i] < thresh:
        acc += w[i] * c[i]
        cum += w[i]
        i += 1
    acc += (alpha - cum) * c[i]
    return acc / alpha


def cvar_weighted(const double[::1] costs, const double[::1] weights,
                  double alpha):
    cdef Py_ssize_t q = costs.shape[0]
    order = np.argsort(costs)[::-1]
    cdef double[::1] c = np.ascontiguousarray(np.asarray(costs)[order])
    cdef double[::1] w = np.ascontiguousarray(np.asarray(weights)[order])
    return _tail_scan(&c[0], &w[0], q, alpha)


def cvar_weighted_rows(const double[:, ::1] costs, const double[::1] weights,
                       double alpha):
    cdef Py_ssize_t m = costs.shape[0]
    cdef Py_ssize_t q = costs.shape[1]
    order = np.argsort(np.asarray(costs), axis=1)[:, ::-1]
    cdef double[:, ::1] c = np.take_along_axis(np.asarray(costs), order, axis=1)
    cdef double[:, ::1] w = np.ascontiguousarray(
        np.asarray(weights)[order])
    res = np.empty(m, dtype=np.float64)
    cdef double[::1] out = res
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _tail_scan(&c[i, 0], &w[i, 0], q, alpha)
    return res
