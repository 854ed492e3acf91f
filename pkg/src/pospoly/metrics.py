"""Evaluation quantities: Monte-Carlo L2 error, negative-point fraction,
and convergence-distance curves against a reference minimizer."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .functions import evaluate


@dataclass(frozen=True)
class EvaluationReport:
    l2_error: float
    negative_fraction: float
    max_violation: float
    n_test_points: int
    seed: Optional[int] = None

    def to_dict(self):
        doc = {
            "l2_error": self.l2_error,
            "negative_fraction": self.negative_fraction,
            "max_violation": self.max_violation,
            "n_test_points": self.n_test_points,
        }
        if self.seed is not None:
            doc["seed"] = int(self.seed)
        return doc


def l2_error_estimate(tf, poly, test):
    """Monte-Carlo estimate sqrt((1/L) sum (f(z_i) - f~(z_i))^2).

    The test points should be distinct from the fitting points (different
    seed or generator); this is a convention recorded in metadata, not
    enforced here.
    """
    pts = test.points
    if pts.shape[0] == 0:
        raise ValueError("test sample set is empty")
    if pts.shape[1] != poly.index_set.dim:
        raise ValueError(
            f"test points have dimension {pts.shape[1]}, "
            f"expected {poly.index_set.dim}"
        )
    diff = evaluate(tf, pts) - poly(pts)
    return float(np.sqrt(np.mean(diff**2)))


def negative_fraction(poly, test):
    """Fraction of test points where the fitted polynomial is strictly negative."""
    pts = test.points
    if pts.shape[0] == 0:
        raise ValueError("test sample set is empty")
    vals = poly(pts)
    return float(np.count_nonzero(vals < 0.0)) / pts.shape[0]


def convergence_distance(trace_coeffs, c_ref):
    """Euclidean distance ||c_k - c_ref|| per coefficient snapshot.

    trace_coeffs is a list of coefficient vectors (or (k, c) pairs as
    stored in SolverResult.primal_history).
    """
    c_ref = np.asarray(c_ref, dtype=np.float64)
    out = []
    for item in trace_coeffs:
        c = item[1] if isinstance(item, tuple) else item
        c = np.asarray(c, dtype=np.float64)
        if c.shape != c_ref.shape:
            raise ValueError(
                f"snapshot of shape {c.shape} does not match reference "
                f"{c_ref.shape}"
            )
        out.append(float(np.linalg.norm(c - c_ref)))
    return out
