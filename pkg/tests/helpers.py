"""Shared test utilities: independent oracles and random instance builders.

The active-set oracle solves the constrained least-squares problem by brute
force (enumerate every candidate active set, solve the KKT equality system,
keep feasible candidates with non-negative multipliers) so solver results
can be checked against an implementation that shares no code with the
first-order methods under test.
"""
import itertools

import numpy as np

import pospoly as pp


def active_set_oracle(prob, cons, tol=1e-9):
    """Exact solution of min (alpha/2)||psi c - f||^2 s.t. B c >= b.

    Returns (primal_opt, c_star, u_star) where u_star is the dual optimum
    (non-positive multipliers). Exponential in the number of constraints;
    intended for C <= ~12.
    """
    psi, f, alpha = prob.psi_a, prob.f, prob.alpha
    B, b = cons.B, cons.b
    Kmat = psi.T @ psi
    z = alpha * (psi.T @ f)
    N = psi.shape[1]
    C = B.shape[0]
    best = None
    for mask in itertools.product([False, True], repeat=C):
        active = [i for i in range(C) if mask[i]]
        m = len(active)
        kkt = np.zeros((N + m, N + m))
        kkt[:N, :N] = alpha * Kmat
        if m:
            kkt[:N, N:] = -B[active].T
            kkt[N:, :N] = B[active]
        rhs = np.concatenate([z, b[active]])
        try:
            sol = np.linalg.solve(kkt, rhs)
        except np.linalg.LinAlgError:
            continue
        c, mu = sol[:N], sol[N:]
        if np.any(B @ c - b < -tol) or np.any(mu < -tol):
            continue
        obj = 0.5 * alpha * float(np.sum((psi @ c - f) ** 2))
        if best is None or obj < best[0]:
            u = np.zeros(C)
            u[active] = -mu
            best = (obj, c, u)
    assert best is not None, "oracle found no feasible KKT point"
    return best


def random_instance(rng, strongly_convex=True):
    """Small random instance with a mix of active and inactive constraints.

    With strongly_convex=True the constraint count never exceeds the
    coefficient count, so M = B K^+ B^T is positive definite almost surely.
    """
    N = int(rng.integers(2, 7))
    C_hi = min(N, 4) if strongly_convex else 4
    C = int(rng.integers(1, C_hi + 1))
    K = int(rng.integers(N + 2, 20))
    psi = rng.standard_normal((K, N))
    f = rng.standard_normal(K)
    alpha = float(rng.uniform(1.0, 100.0))
    B = rng.standard_normal((C, N))
    c_ls = np.linalg.lstsq(psi, f, rcond=None)[0]
    b = B @ c_ls + rng.uniform(-0.5, 0.5, C)
    prob = pp.ApproximationProblem(psi_a=psi, f=f, alpha=alpha)
    cons = pp.ConstraintSet(B=B, b=b)
    return prob, cons, pp.assemble_dual(prob, cons)


def count_total_degree(d, n):
    """Independent count of multi-indices k in N^d with |k| <= n, by
    dynamic programming over dimensions (no binomial formula)."""
    counts = np.zeros(n + 1, dtype=object)
    counts[0] = 1  # zero dimensions: only the empty index, total degree 0
    for _ in range(d):
        counts = np.cumsum(counts)  # new_counts[j] = sum_{i<=j} counts[i]
    return int(np.sum(counts))
