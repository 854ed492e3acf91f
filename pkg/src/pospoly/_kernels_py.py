"""Pure-numpy implementations of the basis evaluation kernels.

Used as the fallback when the compiled extension is unavailable; see
``pospoly.kernels`` for backend selection.
"""
import numpy as np


def legendre_table(nmax, x):
    """Evaluate orthonormal Legendre polynomials of degree 0..nmax at points x.

    Returns an array of shape (nmax + 1, len(x)); row k holds
    sqrt(2k+1) * P_k(x), orthonormal under the uniform probability
    measure dx/2 on [-1, 1].
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    p = np.empty((nmax + 1, x.shape[0]), dtype=np.float64)
    p[0] = 1.0
    if nmax >= 1:
        p[1] = x
    for k in range(1, nmax):
        p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1)
    scale = np.sqrt(2.0 * np.arange(nmax + 1) + 1.0)
    return p * scale[:, None]


def vandermonde_from_tables(indices, tables):
    """Assemble the Vandermonde-like matrix from per-dimension 1-D tables.

    indices : (N, d) int64 array of multi-indices.
    tables : (d, nmax + 1, K) array; tables[j, k, i] is the degree-k
        orthonormal Legendre value at coordinate j of point i.

    Returns (K, N) with entry [i, j] = prod_dim tables[dim, indices[j, dim], i].
    """
    d = indices.shape[1]
    out = tables[0][indices[:, 0], :].copy()
    for j in range(1, d):
        out *= tables[j][indices[:, j], :]
    return np.ascontiguousarray(out.T)
