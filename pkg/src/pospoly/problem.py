"""Constrained least-squares problem assembly and its dual machinery.

The primal problem is

    min_c (alpha/2) ||Psi_a c - f||^2   subject to   B c >= b,

and every solver in this package works on (or against) its Fenchel dual,
a C-dimensional quadratic over the non-positive orthant. ``assemble_dual``
factors everything once: the thin SVD of Psi_a represents the pseudo-inverse
of K = Psi_a^T Psi_a without ever forming an N x N matrix, and the
eigendecomposition of M = B K^+ B^T powers the dual gradient, the proximal
operators, and the primal recovery at O(C^2) per solver iteration.
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import basis
from .errors import DegenerateProblemError

DEFAULT_ALPHA = 100.0
DEFAULT_EPSILON = 1e-5


@dataclass(frozen=True)
class ApproximationProblem:
    psi_a: np.ndarray  # (K, N) Vandermonde at approximation points
    f: np.ndarray  # (K,) sampled function values
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        K, N = self.psi_a.shape
        if self.f.shape != (K,):
            raise ValueError(f"f has shape {self.f.shape}, expected ({K},)")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if K <= N:
            warnings.warn(
                f"under-determined system (K={K} <= N={N}); the dual machinery "
                "still works via the pseudo-inverse but the fit is not unique",
                stacklevel=2,
            )


@dataclass(frozen=True)
class ConstraintSet:
    B: np.ndarray  # (C, N)
    b: np.ndarray  # (C,)
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.B.ndim != 2 or self.b.shape != (self.B.shape[0],):
            raise ValueError("B must be (C, N) with b of length C")

    @property
    def n_constraints(self):
        return self.B.shape[0]


def nonneg_constraints(ms, points, epsilon=DEFAULT_EPSILON,
                       max_entries=basis.DEFAULT_ENTRY_CEILING):
    """Non-negativity constraints f~(y_i) >= epsilon at the given points."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] == 0:
        raise ValueError("constraint point list is empty")
    B = basis.vandermonde(ms, pts, max_entries=max_entries)
    b = np.full(pts.shape[0], float(epsilon))
    return ConstraintSet(
        B=B,
        b=b,
        provenance={"mode": "nonneg", "epsilon": float(epsilon),
                    "n_points": int(pts.shape[0])},
    )


def bound_constraints(ms, points, lower, upper, epsilon=DEFAULT_EPSILON,
                      max_entries=basis.DEFAULT_ENTRY_CEILING):
    """Two-sided constraints lower + eps <= f~(y_i) <= upper - eps.

    Encoded as B = [Psi_p; -Psi_p], b = [lower + eps; -upper + eps].
    """
    if not lower < upper:
        raise ValueError(f"need lower < upper, got ({lower}, {upper})")
    if epsilon < 0 or 2 * epsilon >= upper - lower:
        raise ValueError("epsilon must satisfy 0 <= 2*eps < upper - lower")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] == 0:
        raise ValueError("constraint point list is empty")
    psi_p = basis.vandermonde(ms, pts, max_entries=max_entries)
    B = np.vstack([psi_p, -psi_p])
    C = pts.shape[0]
    b = np.concatenate([
        np.full(C, float(lower) + epsilon),
        np.full(C, -float(upper) + epsilon),
    ])
    return ConstraintSet(
        B=B,
        b=b,
        provenance={"mode": "bounded", "epsilon": float(epsilon),
                    "lower": float(lower), "upper": float(upper),
                    "n_points": int(C)},
    )


@dataclass(frozen=True)
class DualModel:
    """Immutable factorized dual problem; all operations are read-only."""

    alpha: float
    B: np.ndarray  # (C, N)
    b: np.ndarray  # (C,)
    f: np.ndarray  # (K,)
    z: np.ndarray  # (N,) = alpha * Psi_a^T f
    sr: np.ndarray  # (r,) retained singular values of Psi_a
    Vr: np.ndarray  # (r, N) right singular rows of Psi_a
    uf: np.ndarray  # (r,) = U_r^T f
    W: np.ndarray  # (C, r) = B V_r diag(1/sr); M = W W^T
    M: np.ndarray  # (C, C)
    eigvals: np.ndarray  # (C,) eigenvalues of M, clamped to >= 0, ascending
    eigvecs: np.ndarray  # (C, C)
    Bkz: np.ndarray  # (C,) = B K^+ z
    q: np.ndarray  # (C,) = (1/alpha) B K^+ z - b
    half_alpha_ff: float  # (alpha/2) f^T f, the constant term of G*

    @property
    def n_constraints(self):
        return self.B.shape[0]

    @property
    def n_coeffs(self):
        return self.B.shape[1]

    @property
    def rank(self):
        return self.sr.shape[0]

    @property
    def lambda_max(self):
        return float(self.eigvals[-1])

    @property
    def lambda_min(self):
        return float(self.eigvals[0])

    @property
    def condition_number(self):
        lam_min = self.lambda_min
        return self.lambda_max / lam_min if lam_min > 0 else np.inf

    @property
    def default_step(self):
        # eta = alpha / lambda_max(M), the 1/L step for grad G*
        return self.alpha / self.lambda_max

    def Gstar(self, u):
        """Dual objective G*(u), including the constant -(alpha/2) f^T f.

        The quadratic part is evaluated as the squared norm of the factored
        residual alpha*uf - W^T u (cost O(C r)); unlike the expanded form
        z K^+ z - 2 u.BK^+z + u.Mu it has no catastrophic cancellation, which
        matters for the function-value restart test near the optimum.
        """
        u = np.asarray(u, dtype=np.float64)
        if u.shape != self.b.shape:
            raise ValueError(f"u has shape {u.shape}, expected {self.b.shape}")
        t = self.alpha * self.uf - self.W.T @ u
        return float(
            (t @ t) / (2.0 * self.alpha) - self.half_alpha_ff + self.b @ u
        )

    def grad_Gstar(self, u):
        u = np.asarray(u, dtype=np.float64)
        if u.shape != self.b.shape:
            raise ValueError(f"u has shape {u.shape}, expected {self.b.shape}")
        return (self.M @ u) / self.alpha - self.q

    def prox_Gstar(self, u, gamma):
        """Proximal operator of G* with step gamma, via the eigendecomposition."""
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        rhs = np.asarray(u, dtype=np.float64) + gamma * self.q
        t = self.eigvecs.T @ rhs
        t /= 1.0 + (gamma / self.alpha) * self.eigvals
        return self.eigvecs @ t

    def prox_g(self, c, gamma):
        """Proximal operator of the data term g(c) = (alpha/2)||Psi_a c - f||^2.

        Closed form (I + gamma*alpha*K)^(-1) (c + gamma*z), applied through
        the retained SVD subspace (identity action on its complement).
        """
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        x = np.asarray(c, dtype=np.float64) + gamma * self.z
        t = self.Vr @ x
        scaled = t / (1.0 + gamma * self.alpha * self.sr**2)
        if self.rank == self.Vr.shape[1]:
            # full column rank: x has no component outside the SVD subspace,
            # so assembling from the scaled coordinates alone avoids the
            # cancellation of x + Vr^T (scaled - t)
            return self.Vr.T @ scaled
        return x + self.Vr.T @ (scaled - t)

    def recover_primal(self, u):
        """Primal coefficients c = K^+ (z - B^T u) / alpha."""
        u = np.asarray(u, dtype=np.float64)
        if u.shape != self.b.shape:
            raise ValueError(f"u has shape {u.shape}, expected {self.b.shape}")
        t = (self.uf - (self.W.T @ u) / self.alpha) / self.sr
        return self.Vr.T @ t


def prox_hstar(u):
    """Projection onto the non-positive orthant (cut-off operator)."""
    return np.minimum(u, 0.0)


def assemble_dual(prob, cons, rcond=None):
    """Factor the problem into a DualModel.

    rcond truncates singular values of Psi_a at rcond * sigma_max; the
    default is machine epsilon times max(K, N). K^+ is never materialized
    densely.
    """
    psi_a = np.asarray(prob.psi_a, dtype=np.float64)
    B = np.asarray(cons.B, dtype=np.float64)
    f = np.asarray(prob.f, dtype=np.float64)
    b = np.asarray(cons.b, dtype=np.float64)
    if psi_a.shape[1] != B.shape[1]:
        raise ValueError(
            f"column mismatch: Psi_a has {psi_a.shape[1]} columns, "
            f"B has {B.shape[1]}"
        )
    zero_rows = np.flatnonzero(~np.any(B != 0.0, axis=1))
    if zero_rows.size:
        raise DegenerateProblemError(
            f"constraint rows {zero_rows.tolist()} of B are identically zero"
        )
    if rcond is None:
        rcond = np.finfo(np.float64).eps * max(psi_a.shape)
    if not 0.0 < rcond < 1.0:
        raise ValueError("rcond must lie in (0, 1)")

    U, s, Vt = np.linalg.svd(psi_a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise DegenerateProblemError("Psi_a is identically zero")
    r = int(np.count_nonzero(s > rcond * s[0]))
    if r == 0:
        raise DegenerateProblemError("Psi_a has numerical rank 0")
    Ur, sr, Vr = U[:, :r], s[:r], Vt[:r]

    alpha = float(prob.alpha)
    uf = Ur.T @ f
    W = (B @ Vr.T) / sr
    M = W @ W.T
    eigvals, eigvecs = np.linalg.eigh(M)
    eigvals = np.maximum(eigvals, 0.0)
    Bkz = alpha * (W @ uf)
    z = alpha * (psi_a.T @ f)
    q = Bkz / alpha - b

    return DualModel(
        alpha=alpha, B=B, b=b, f=f, z=z, sr=sr, Vr=Vr, uf=uf, W=W, M=M,
        eigvals=eigvals, eigvecs=eigvecs, Bkz=Bkz, q=q,
        half_alpha_ff=float(0.5 * alpha * (f @ f)),
    )


def primal_objective(prob, cons, c):
    """Least-squares value and feasibility diagnostics of a coefficient vector."""
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (prob.psi_a.shape[1],):
        raise ValueError(
            f"c has shape {c.shape}, expected ({prob.psi_a.shape[1]},)"
        )
    resid = prob.psi_a @ c - prob.f
    lsq = 0.5 * prob.alpha * float(resid @ resid)
    slack = cons.B @ c - cons.b
    max_violation = float(max(0.0, -slack.min())) if slack.size else 0.0
    return {
        "lsq": lsq,
        "feasible": max_violation == 0.0,
        "max_violation": max_violation,
    }


@dataclass(frozen=True)
class PolynomialModel:
    """A polynomial in the orthonormal Legendre basis: f~(x) = <c, Psi(x)>."""

    index_set: basis.MultiIndexSet
    c: np.ndarray

    def __post_init__(self):
        if self.c.shape != (self.index_set.size,):
            raise ValueError(
                f"coefficient vector of length {self.c.shape} does not match "
                f"basis size {self.index_set.size}"
            )

    def __call__(self, points):
        psi = basis.vandermonde(self.index_set, points)
        return psi @ self.c

    def to_dict(self, alpha=None, provenance=None):
        doc = {
            "basis": {
                "dim": self.index_set.dim,
                "degree": self.index_set.degree,
                "ordering": "grlex",
                "normalization": "uniform_probability",
            },
            "coefficients": [float(v) for v in self.c],
        }
        if alpha is not None:
            doc["alpha"] = float(alpha)
        if provenance is not None:
            doc["provenance"] = provenance
        return doc

    @classmethod
    def from_dict(cls, doc):
        meta = doc["basis"]
        ms = basis.total_degree_indices(int(meta["dim"]), int(meta["degree"]))
        c = np.asarray(doc["coefficients"], dtype=np.float64)
        return cls(index_set=ms, c=c)
