# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled basis evaluation kernels (Cython).

Same contracts as ``pospoly._kernels_py``; selected at import by
``pospoly.kernels`` when available.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def legendre_table(int nmax, double[::1] x):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t i, k
    out = np.empty((nmax + 1, m), dtype=np.float64)
    cdef double[:, ::1] p = out
    for i in range(m):
        p[0, i] = 1.0
    if nmax >= 1:
        for i in range(m):
            p[1, i] = x[i]
    for k in range(1, nmax):
        for i in range(m):
            p[k + 1, i] = ((2 * k + 1) * x[i] * p[k, i] - k * p[k - 1, i]) / (k + 1)
    cdef double s
    for k in range(nmax + 1):
        s = sqrt(2.0 * k + 1.0)
        for i in range(m):
            p[k, i] *= s
    return out


def vandermonde_from_tables(const cnp.int64_t[:, ::1] indices, const double[:, :, ::1] tables):
    cdef Py_ssize_t n = indices.shape[0]
    cdef Py_ssize_t d = indices.shape[1]
    cdef Py_ssize_t m = tables.shape[2]
    cdef Py_ssize_t i, j, dim
    cdef cnp.int64_t k
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    for j in range(n):
        k = indices[j, 0]
        for i in range(m):
            o[i, j] = tables[0, k, i]
        for dim in range(1, d):
            k = indices[j, dim]
            for i in range(m):
                o[i, j] *= tables[dim, k, i]
    return out
