"""First-order solvers for the dual (and primal-dual) constrained LS problem.

Seven methods share one stopping/tracing harness:

  fista                 accelerated proximal gradient on the dual
  rfista                FISTA with adaptive restart (the flagship method)
  fista_fixed_restart   FISTA restarted every fixed number of iterations
  vfista                constant-momentum FISTA (needs strong convexity)
  projected_gradient    forward-backward splitting on the dual
  douglas_rachford      reflected-proximal splitting on the dual
  pdhg                  accelerated primal-dual hybrid gradient

Termination requires BOTH shared criteria: the recovered primal iterate has
stopped moving (||c_k - c_prev||_2 <= tol, default 1e-14) and satisfies the
constraints B c >= b. Feasibility is checked against the componentwise
rounding error of evaluating B c - b itself (a backward-error bound), so a
fixed point whose active slacks round a few ulps below zero still counts;
the reported max_violation is always the exact computed value.
"""
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, DivergenceError
from .problem import prox_hstar

METHODS = (
    "fista",
    "rfista",
    "fista_fixed_restart",
    "vfista",
    "projected_gradient",
    "douglas_rachford",
    "pdhg",
)

RESTART_RULES = ("function_value", "gradient_mapping")


@dataclass
class SolverConfig:
    method: str = "rfista"
    step: Optional[float] = None  # default alpha / lambda_max(M)
    max_iter: int = 100_000
    # gradient_mapping is the default: the function-value rule thrashes at
    # the floating-point noise floor of the dual objective and degrades to
    # projected gradient long before round-off convergence
    restart_rule: str = "gradient_mapping"
    restart_period: Optional[int] = None
    dr_lambda: float = 1.0
    dr_gamma: Optional[float] = None
    pdhg_mu: Optional[float] = None
    pdhg_tau0: Optional[float] = None
    pdhg_eta0: Optional[float] = None
    primal_check_interval: int = 1
    primal_change_tol: float = 1e-14
    trace_every: int = 1
    keep_primal_history: bool = False
    stall_checks: int = 5000

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if self.step is not None and self.step <= 0:
            raise ConfigError("step must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.restart_rule not in RESTART_RULES:
            raise ConfigError(f"unknown restart rule {self.restart_rule!r}")
        if self.restart_period is not None and self.restart_period < 1:
            raise ConfigError("restart_period must be >= 1")
        if not 0.0 < self.dr_lambda <= 2.0:
            raise ConfigError("dr_lambda must lie in (0, 2]")
        if self.primal_check_interval < 1:
            raise ConfigError("primal_check_interval must be >= 1")
        if self.trace_every < 1:
            raise ConfigError("trace_every must be >= 1")
        if self.pdhg_mu is not None and self.pdhg_mu <= 0:
            raise ConfigError("pdhg_mu must be positive")


@dataclass
class SolverTrace:
    """Per-iteration convergence record shared by all solvers."""

    k: list = field(default_factory=list)
    dual_objective: list = field(default_factory=list)
    primal_change: list = field(default_factory=list)
    max_violation: list = field(default_factory=list)
    restarted: list = field(default_factory=list)
    elapsed_s: list = field(default_factory=list)

    def append(self, k, dual_objective, primal_change, max_violation,
               restarted, elapsed_s):
        self.k.append(int(k))
        self.dual_objective.append(float(dual_objective))
        self.primal_change.append(float(primal_change))
        self.max_violation.append(float(max_violation))
        self.restarted.append(bool(restarted))
        self.elapsed_s.append(float(elapsed_s))

    def __len__(self):
        return len(self.k)


@dataclass
class SolverResult:
    u_star: np.ndarray
    c_star: np.ndarray
    iterations: int
    status: str  # converged | max_iter | stalled
    trace: SolverTrace
    method: str
    step: float
    restart_count: int = 0
    # populated only when cfg.keep_primal_history is set
    primal_history: Optional[list] = None  # list of (k, c) pairs


def _effective_step(model, cfg):
    return model.default_step if cfg.step is None else float(cfg.step)


def _run_loop(model, cfg, advance, step):
    """Drive `advance` under the shared stopping criteria.

    advance(k) -> (u, c_or_None, restarted). When c is None the primal
    iterate is recovered from u at check points.
    """
    tol = cfg.primal_change_tol
    interval = cfg.primal_check_interval
    eps = np.finfo(np.float64).eps
    absB = np.abs(model.B)
    absb = np.abs(model.b)
    trace = SolverTrace()
    history = [] if cfg.keep_primal_history else None
    t0 = time.perf_counter()

    c_prev = None
    best_change = np.inf
    stall_counter = 0
    restart_count = 0
    status = "max_iter"
    u = c = None
    k = 0

    for k in range(1, cfg.max_iter + 1):
        u, c_direct, restarted = advance(k)
        if restarted:
            restart_count += 1
        if not np.all(np.isfinite(u)):
            raise DivergenceError(
                f"{cfg.method} produced a non-finite iterate at k={k}", trace
            )
        terminal = k == cfg.max_iter
        check = (k % interval == 0) or restarted or terminal
        if not check:
            continue

        c = c_direct if c_direct is not None else model.recover_primal(u)
        if not np.all(np.isfinite(c)):
            raise DivergenceError(
                f"{cfg.method} produced a non-finite primal iterate at k={k}",
                trace,
            )
        if history is not None:
            history.append((k, c.copy()))
        slack = model.B @ c - model.b
        max_violation = max(0.0, float(-slack.min()))
        # componentwise rounding error of the slack evaluation itself;
        # violations below it are floating-point artifacts of a feasible
        # fixed point, not genuine constraint violations
        rounding = 8.0 * eps * (absB @ np.abs(c) + absb)
        feasible = bool(np.all(slack >= -rounding))
        primal_change = (
            float(np.linalg.norm(c - c_prev)) if c_prev is not None else np.inf
        )

        done = c_prev is not None and primal_change <= tol and feasible
        if done:
            status = "converged"
        else:
            # stall detection: the primal change has stopped improving for
            # many consecutive checks while the iterate stays infeasible
            # beyond rounding or feasibly above the tolerance
            if primal_change < best_change:
                best_change = primal_change
                stall_counter = 0
            elif (feasible and primal_change > tol) or (
                not feasible and primal_change <= tol
            ):
                stall_counter += 1
            if stall_counter >= cfg.stall_checks:
                status = "stalled"
                done = True

        if (k % cfg.trace_every == 0) or restarted or done or terminal:
            trace.append(
                k, model.Gstar(u), primal_change, max_violation, restarted,
                time.perf_counter() - t0,
            )
        c_prev = c
        if done:
            break

    return SolverResult(
        u_star=u,
        c_star=c if c is not None else model.recover_primal(u),
        iterations=k,
        status=status,
        trace=trace,
        method=cfg.method,
        step=step,
        restart_count=restart_count,
        primal_history=history,
    )


def _momentum_coef(t_old, t_new):
    return (t_old - 1.0) / t_new


def _next_t(t):
    return (1.0 + math.sqrt(1.0 + 4.0 * t * t)) / 2.0


def solve_fista(model, cfg):
    """Plain FISTA on the dual problem."""
    eta = _effective_step(model, cfg)
    if eta > model.default_step * (1 + 1e-12):
        warnings.warn(
            f"step {eta:g} exceeds alpha/lambda_max = {model.default_step:g}; "
            "convergence is not guaranteed",
            stacklevel=2,
        )
    C = model.n_constraints
    state = {"u": np.zeros(C), "y": np.zeros(C), "t": 1.0}

    def advance(k):
        y, t = state["y"], state["t"]
        u_new = prox_hstar(y - eta * model.grad_Gstar(y))
        t_new = _next_t(t)
        state["y"] = u_new + _momentum_coef(t, t_new) * (u_new - state["u"])
        state["u"], state["t"] = u_new, t_new
        return u_new, None, False

    return _run_loop(model, cfg, advance, eta)


def solve_rfista(model, cfg):
    """FISTA with adaptive restart on the dual problem.

    Restart fires on the function-value rule (dual objective increased) or
    the gradient-mapping rule, per cfg.restart_rule; a restart resets the
    momentum sequence (t <- 1) and the momentum point (y <- u).
    """
    eta = _effective_step(model, cfg)
    C = model.n_constraints
    state = {
        "u": np.zeros(C),
        "y": np.zeros(C),
        "t": 1.0,
        "fval": model.Gstar(np.zeros(C)),
    }

    def advance(k):
        y, t = state["y"], state["t"]
        g = model.grad_Gstar(y)
        u_new = prox_hstar(y - eta * g)
        if cfg.restart_rule == "function_value":
            fval_new = model.Gstar(u_new)
            restart = fval_new > state["fval"]
            state["fval"] = fval_new
        else:  # gradient_mapping
            restart = float(g @ (u_new - state["u"])) > 0.0
        if restart:
            state["t"] = 1.0
            state["y"] = u_new.copy()
        else:
            t_new = _next_t(t)
            state["y"] = u_new + _momentum_coef(t, t_new) * (u_new - state["u"])
            state["t"] = t_new
        state["u"] = u_new
        return u_new, None, restart

    return _run_loop(model, cfg, advance, eta)


def default_restart_period(model):
    """Fixed restart period ceil(sqrt(8*kappa) - 1) from the condition number."""
    kappa = model.condition_number
    if not np.isfinite(kappa):
        raise ConfigError(
            "restart period default needs lambda_min(M) > 0; "
            "pass restart_period explicitly"
        )
    return max(1, math.ceil(math.sqrt(8.0 * kappa) - 1.0))


def solve_fista_fixed_restart(model, cfg):
    """FISTA restarted (t <- 1, y <- u) every restart_period iterations."""
    eta = _effective_step(model, cfg)
    period = cfg.restart_period
    if period is None:
        period = default_restart_period(model)
    C = model.n_constraints
    state = {"u": np.zeros(C), "y": np.zeros(C), "t": 1.0}

    def advance(k):
        y, t = state["y"], state["t"]
        u_new = prox_hstar(y - eta * model.grad_Gstar(y))
        restart = (k % period) == 0
        if restart:
            state["t"] = 1.0
            state["y"] = u_new.copy()
        else:
            t_new = _next_t(t)
            state["y"] = u_new + _momentum_coef(t, t_new) * (u_new - state["u"])
            state["t"] = t_new
        state["u"] = u_new
        return u_new, None, restart

    return _run_loop(model, cfg, advance, eta)


def solve_vfista(model, cfg):
    """FISTA with constant momentum (sqrt(kappa)-1)/(sqrt(kappa)+1).

    Requires a strongly convex dual, i.e. lambda_min(M) > 0; refused
    otherwise because the constant-momentum scheme degrades badly on
    ill-conditioned systems.
    """
    kappa = model.condition_number
    if not np.isfinite(kappa):
        raise ConfigError(
            "v-FISTA needs lambda_min(M) > 0; the system is too "
            "ill-conditioned for constant momentum"
        )
    eta = _effective_step(model, cfg)
    beta = (math.sqrt(kappa) - 1.0) / (math.sqrt(kappa) + 1.0)
    C = model.n_constraints
    state = {"u": np.zeros(C), "y": np.zeros(C)}

    def advance(k):
        u_new = prox_hstar(state["y"] - eta * model.grad_Gstar(state["y"]))
        state["y"] = u_new + beta * (u_new - state["u"])
        state["u"] = u_new
        return u_new, None, False

    return _run_loop(model, cfg, advance, eta)


def solve_projected_gradient(model, cfg):
    """Forward-backward splitting u <- cutoff(u - eta * grad G*(u))."""
    eta = _effective_step(model, cfg)
    C = model.n_constraints
    state = {"u": np.zeros(C)}

    def advance(k):
        u_new = prox_hstar(state["u"] - eta * model.grad_Gstar(state["u"]))
        state["u"] = u_new
        return u_new, None, False

    return _run_loop(model, cfg, advance, eta)


def solve_douglas_rachford(model, cfg):
    """Relaxed Douglas-Rachford splitting on the dual problem.

    p <- (1 - lam/2) p + (lam/2) R_G*(R_h*(p)); the reported dual iterate is
    u = cutoff(p). Default gamma equals the FISTA step; lam = 2 requires a
    strongly convex dual.
    """
    gamma = cfg.dr_gamma if cfg.dr_gamma is not None else _effective_step(model, cfg)
    if gamma <= 0:
        raise ConfigError("dr_gamma must be positive")
    lam = cfg.dr_lambda
    if lam == 2.0 and not np.isfinite(model.condition_number):
        raise ConfigError(
            "dr_lambda = 2 converges only for a strongly convex dual "
            "(lambda_min(M) > 0)"
        )
    C = model.n_constraints
    state = {"p": np.zeros(C)}

    def advance(k):
        p = state["p"]
        rh = 2.0 * prox_hstar(p) - p
        rg = 2.0 * model.prox_Gstar(rh, gamma) - rh
        p_new = (1.0 - lam / 2.0) * p + (lam / 2.0) * rg
        state["p"] = p_new
        return prox_hstar(p_new), None, False

    return _run_loop(model, cfg, advance, gamma)


def solve_pdhg_accel(prob, cons, model, cfg):
    """Accelerated primal-dual hybrid gradient on the saddle formulation.

    mu defaults to alpha times the smallest retained squared singular value
    of Psi_a (the strong-convexity modulus of the data term when K has full
    rank); tau_0 = eta_0 = 1/||B||_2 so that tau_0 * eta_0 * ||B||^2 = 1.
    The iterates live in primal space, so stopping checks c_k directly.
    """
    B, b, alpha = model.B, model.b, model.alpha
    mu = cfg.pdhg_mu
    if mu is None:
        mu = alpha * float(model.sr.min()) ** 2
    if mu <= 0:
        raise ConfigError("pdhg_mu must be positive")
    Bnorm = float(np.linalg.norm(B, 2))
    tau = cfg.pdhg_tau0 if cfg.pdhg_tau0 is not None else 1.0 / Bnorm
    eta = cfg.pdhg_eta0 if cfg.pdhg_eta0 is not None else 1.0 / Bnorm
    if tau <= 0 or eta <= 0:
        raise ConfigError("pdhg_tau0 and pdhg_eta0 must be positive")
    if tau * eta * Bnorm**2 > 1.0 + 1e-12:
        raise ConfigError(
            f"pdhg step products violate tau*eta*||B||^2 <= 1 "
            f"(got {tau * eta * Bnorm**2:g})"
        )
    C, N = B.shape
    state = {
        "u": np.zeros(C),
        "c": np.zeros(N),
        "cbar": np.zeros(N),
        "tau": tau,
        "eta": eta,
    }

    def advance(k):
        u = prox_hstar(state["u"] + state["tau"] * (B @ state["cbar"] - b))
        c_new = model.prox_g(state["c"] - state["eta"] * (B.T @ u), state["eta"])
        theta = 1.0 / math.sqrt(1.0 + 2.0 * mu * state["eta"])
        state["eta"] *= theta
        state["tau"] /= theta
        state["cbar"] = c_new + theta * (c_new - state["c"])
        state["u"], state["c"] = u, c_new
        return u, c_new, False

    return _run_loop(model, cfg, advance, eta)


_DUAL_SOLVERS = {
    "fista": solve_fista,
    "rfista": solve_rfista,
    "fista_fixed_restart": solve_fista_fixed_restart,
    "vfista": solve_vfista,
    "projected_gradient": solve_projected_gradient,
    "douglas_rachford": solve_douglas_rachford,
}


def solve(model, cfg, prob=None, cons=None):
    """Dispatch to the configured method."""
    if cfg.method == "pdhg":
        return solve_pdhg_accel(prob, cons, model, cfg)
    return _DUAL_SOLVERS[cfg.method](model, cfg)
