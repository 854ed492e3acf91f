"""Total-degree multi-index sets and orthonormal tensor Legendre bases.

The univariate factors are Legendre polynomials scaled by sqrt(2k+1) so
that they are orthonormal with respect to the uniform probability measure
dx/2 on [-1, 1]; the constant basis function is identically 1. Multi-indices
are ordered graded-lexicographically: by total degree first, then
lexicographically (descending in the first coordinate) within each grade.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapacityError

# Refuse to materialize matrices larger than this many entries (see
# ``vandermonde``); CLI --force raises it.
DEFAULT_ENTRY_CEILING = 200_000_000

_INT64_MAX = 2**63 - 1


def subspace_dim(d, n):
    """Dimension C(n+d, d) of the total-degree-n polynomial space in d variables."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    size = math.comb(n + d, d)
    if size > _INT64_MAX:
        raise CapacityError(
            f"polynomial space dimension C({n + d},{d}) = {size} exceeds 64-bit range"
        )
    return size


@dataclass(frozen=True)
class MultiIndexSet:
    """Ordered set of all multi-indices with |k| <= degree in `dim` variables."""

    dim: int
    degree: int
    indices: np.ndarray = field(repr=False)  # (N, dim) int64, graded lex order

    def __len__(self):
        return self.indices.shape[0]

    def __iter__(self):
        for row in self.indices:
            yield tuple(int(v) for v in row)

    @property
    def size(self):
        return self.indices.shape[0]

    def metadata(self):
        return {
            "dim": self.dim,
            "degree": self.degree,
            "ordering": "grlex",
            "normalization": "uniform_probability",
            "size": self.size,
        }


def _compositions(total, parts):
    # All ways to write `total` as an ordered sum of `parts` non-negative
    # integers, first coordinate descending (grlex within a grade).
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def total_degree_indices(d, n, max_size=DEFAULT_ENTRY_CEILING):
    """Build the graded-lexicographic MultiIndexSet for the space of
    d-variate polynomials of total degree <= n."""
    size = subspace_dim(d, n)
    if size > max_size:
        raise CapacityError(
            f"index set of size {size} exceeds the ceiling {max_size}"
        )
    indices = np.empty((size, d), dtype=np.int64)
    row = 0
    for grade in range(n + 1):
        for comp in _compositions(grade, d):
            indices[row] = comp
            row += 1
    assert row == size
    indices.setflags(write=False)
    return MultiIndexSet(dim=d, degree=n, indices=indices)


def legendre_eval_1d(k, x):
    """Orthonormal Legendre value sqrt(2k+1) * P_k(x)."""
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    table = kernels.legendre_table(k, np.array([x], dtype=np.float64))
    return float(table[k, 0])


def basis_eval(ms, x):
    """Evaluate all N basis functions at one point; returns a length-N vector."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != ms.dim:
        raise ValueError(f"point has dimension {x.shape[0]}, expected {ms.dim}")
    return vandermonde(ms, x[None, :])[0]


def vandermonde(ms, points, max_entries=DEFAULT_ENTRY_CEILING):
    """Vandermonde-like matrix: row i holds the basis values at points[i].

    points : (K, dim) array (a 1-D array is accepted when dim == 1).
    Returns a (K, N) array in graded-lexicographic column order.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    if points.ndim != 2 or points.shape[1] != ms.dim:
        raise ValueError(
            f"points must have shape (K, {ms.dim}), got {points.shape}"
        )
    n_entries = points.shape[0] * ms.size
    if n_entries > max_entries:
        raise CapacityError(
            f"Vandermonde matrix with {n_entries} entries exceeds the ceiling "
            f"{max_entries}"
        )
    tables = np.empty((ms.dim, ms.degree + 1, points.shape[0]), dtype=np.float64)
    for j in range(ms.dim):
        tables[j] = kernels.legendre_table(
            ms.degree, np.ascontiguousarray(points[:, j])
        )
    return kernels.vandermonde_from_tables(ms.indices, tables)
