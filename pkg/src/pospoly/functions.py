"""Benchmark test functions and sampling-point generators.

All functions are defined on the hypercube [-1, 1]^d. The univariate
kinds (runge, truncated_sine, step) require d == 1; the peak families
take per-dimension shape parameters sigma (and omega where applicable).
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CapacityError

UNIVARIATE_KINDS = ("runge", "truncated_sine", "step")
PEAK_KINDS = ("gaussian_peak", "continuous_peak", "corner_peak")
KINDS = UNIVARIATE_KINDS + PEAK_KINDS

# Conventional defaults for the peak families; corner_peak is usually run
# with a sharper profile.
DEFAULT_SIGMA = {"gaussian_peak": 10.0, "continuous_peak": 10.0, "corner_peak": 20.0}
DEFAULT_OMEGA = 0.5


@dataclass(frozen=True)
class TestFunction:
    kind: str
    dim: int
    sigma: Optional[np.ndarray] = None
    omega: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown test function kind {self.kind!r}")
        if self.kind in UNIVARIATE_KINDS:
            if self.dim != 1:
                raise ValueError(f"{self.kind} is univariate, got d={self.dim}")
            if self.sigma is not None or self.omega is not None:
                raise ValueError(f"{self.kind} takes no sigma/omega parameters")
        else:
            if self.sigma is None or len(self.sigma) != self.dim:
                raise ValueError(f"{self.kind} needs sigma of length {self.dim}")
            if self.kind == "corner_peak":
                if self.omega is not None:
                    raise ValueError("corner_peak takes no omega parameter")
            elif self.omega is None or len(self.omega) != self.dim:
                raise ValueError(f"{self.kind} needs omega of length {self.dim}")

    def __call__(self, points):
        return evaluate(self, points)


def make_test_function(kind, dim, sigma=None, omega=None):
    """Construct a TestFunction, filling in the conventional parameter defaults."""
    if kind in UNIVARIATE_KINDS:
        return TestFunction(kind=kind, dim=dim)
    if sigma is None:
        sigma = DEFAULT_SIGMA[kind]
    sigma = np.broadcast_to(np.asarray(sigma, dtype=np.float64), (dim,)).copy()
    if kind == "corner_peak":
        omega_arr = None
    else:
        if omega is None:
            omega = DEFAULT_OMEGA
        omega_arr = np.broadcast_to(np.asarray(omega, dtype=np.float64), (dim,)).copy()
    return TestFunction(kind=kind, dim=dim, sigma=sigma, omega=omega_arr)


def evaluate(tf, points):
    """Evaluate tf at an array of points; returns a length-K vector.

    points : (K, d) array; a 1-D array is accepted when d == 1.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != tf.dim:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {tf.dim}")
    if tf.kind == "runge":
        x = pts[:, 0]
        return (101.0 / 100.0) * (1.0 / (1.0 + 100.0 * x**2) - 1.0 / 101.0)
    if tf.kind == "truncated_sine":
        x = pts[:, 0]
        vals = np.sin(np.pi * (x + 1.0) / 2.0) - math.sin(0.6 * math.pi)
        return np.where(np.abs(x) < 0.2, vals, 0.0)
    if tf.kind == "step":
        return (pts[:, 0] > 0).astype(np.float64)
    u = (pts + 1.0) / 2.0
    if tf.kind == "gaussian_peak":
        expo = np.sum(tf.sigma**2 * (u - tf.omega) ** 2, axis=1)
        return np.exp(-expo)
    if tf.kind == "continuous_peak":
        expo = np.sum(tf.sigma * np.abs(u - tf.omega), axis=1)
        return np.exp(-expo)
    # corner_peak
    s = 1.0 + np.sum(tf.sigma * u, axis=1)
    return s ** (-(tf.dim + 1.0))


def eval_at(tf, x):
    """Evaluate tf at a single point."""
    pt = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return float(evaluate(tf, pt[None, :])[0])


@dataclass(frozen=True)
class SampleSet:
    """A set of points in [-1, 1]^d plus the recipe that produced it."""

    points: np.ndarray  # (K, d)
    generator: str  # chebyshev | equidistant | uniform_random | tensor_grid
    seed: Optional[int] = None

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def metadata(self):
        meta = {
            "generator": self.generator,
            "count": int(self.points.shape[0]),
            "dim": int(self.points.shape[1]),
        }
        if self.seed is not None:
            meta["seed"] = int(self.seed)
            meta["rng"] = "numpy-PCG64"
        return meta


def chebyshev_nodes(count):
    """Chebyshev-Gauss nodes cos((2i-1)pi/(2K)), i=1..K, in increasing order."""
    if count < 1:
        raise ValueError("need at least one node")
    i = np.arange(1, count + 1, dtype=np.float64)
    pts = np.cos((2 * i - 1) * np.pi / (2 * count))[::-1]
    return SampleSet(points=pts.copy()[:, None], generator="chebyshev")


def equidistant(count):
    """Equidistant grid -1 + 2(i-1)/(M-1), i=1..M, endpoints included."""
    if count < 2:
        raise ValueError("need at least two grid points")
    i = np.arange(count, dtype=np.float64)
    pts = -1.0 + 2.0 * i / (count - 1)
    return SampleSet(points=pts[:, None], generator="equidistant")


def uniform_random(count, dim, seed):
    """I.i.d. uniform points on [-1, 1]^d from a seeded PCG64 generator."""
    if count < 1 or dim < 1:
        raise ValueError("count and dim must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.uniform(-1.0, 1.0, size=(count, dim))
    return SampleSet(points=pts, generator="uniform_random", seed=int(seed))


def tensor_grid(per_dim, dim, max_points=50_000_000):
    """Cartesian product of a 1-D equidistant grid, row-major enumeration."""
    if per_dim < 2 or dim < 1:
        raise ValueError("per_dim must be >= 2 and dim >= 1")
    total = per_dim**dim
    if total > max_points:
        raise CapacityError(f"tensor grid with {total} points exceeds {max_points}")
    axis = equidistant(per_dim).points[:, 0]
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(total, dim)
    return SampleSet(points=pts, generator="tensor_grid")
