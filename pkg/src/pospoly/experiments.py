"""Experiment pipelines behind the CLI: fit, compare, sweep.

Each pipeline takes a fully resolved config mapping (see config.resolve_config)
and returns plain data; file writing lives in the CLI layer.
"""
import copy
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import basis, config, functions, metrics, problem, solvers
from .errors import ConfigError, PospolyError

REFERENCE_ITERATIONS = 5000  # length of the r-FISTA reference run in compare


@dataclass
class FitOutcome:
    tf: functions.TestFunction
    index_set: basis.MultiIndexSet
    prob: problem.ApproximationProblem
    cons: problem.ConstraintSet
    dual: problem.DualModel
    result: solvers.SolverResult
    poly: problem.PolynomialModel
    report: metrics.EvaluationReport
    resolved: dict


def _build_function(cfg):
    fn = cfg["function"]
    return functions.make_test_function(
        fn["kind"], fn["d"], sigma=fn.get("sigma"), omega=fn.get("omega")
    )


def build_problem(cfg, capacity=config.DEFAULT_CAPACITY):
    """Assemble everything up to the DualModel from a resolved config."""
    tf = _build_function(cfg)
    d = tf.dim
    seed = cfg["seed"]
    ms = basis.total_degree_indices(d, cfg["basis"]["degree"], max_size=capacity)

    fit_set = config.build_samples(cfg["fit_samples"], d, seed, "fit_samples")
    cons_spec = cfg["constraints"]
    cons_set = config.build_samples(cons_spec["points"], d, seed, "constraint_points")
    n_cons_rows = len(cons_set) * (2 if cons_spec["mode"] == "bounded" else 1)
    config.check_capacity(len(fit_set), ms.size, n_cons_rows, capacity)

    psi_a = basis.vandermonde(ms, fit_set.points, max_entries=capacity)
    f = functions.evaluate(tf, fit_set.points)
    prob = problem.ApproximationProblem(psi_a=psi_a, f=f, alpha=cfg["alpha"])

    if cons_spec["mode"] == "nonneg":
        cons = problem.nonneg_constraints(
            ms, cons_set.points, epsilon=cons_spec["epsilon"],
            max_entries=capacity,
        )
    else:
        lower, upper = cons_spec["bounds"]
        cons = problem.bound_constraints(
            ms, cons_set.points, lower, upper, epsilon=cons_spec["epsilon"],
            max_entries=capacity,
        )
    dual = problem.assemble_dual(prob, cons)
    return tf, ms, prob, cons, dual


def evaluate_fit(cfg, tf, poly, result):
    """Score a fitted polynomial on the configured test sample."""
    test_spec = cfg["evaluation"]["test"]
    test_set = config.build_samples(test_spec, tf.dim, cfg["seed"], "test_samples")
    return metrics.EvaluationReport(
        l2_error=metrics.l2_error_estimate(tf, poly, test_set),
        negative_fraction=metrics.negative_fraction(poly, test_set),
        max_violation=float(result.trace.max_violation[-1])
        if len(result.trace) else float("nan"),
        n_test_points=len(test_set),
        seed=test_set.seed,
    )


def run_fit(cfg, capacity=config.DEFAULT_CAPACITY):
    """Fit per the config; returns a FitOutcome."""
    tf, ms, prob, cons, dual = build_problem(cfg, capacity)
    scfg = config.build_solver_config(cfg["solver"])
    result = solvers.solve(dual, scfg, prob, cons)
    poly = problem.PolynomialModel(index_set=ms, c=result.c_star)
    report = evaluate_fit(cfg, tf, poly, result)
    return FitOutcome(
        tf=tf, index_set=ms, prob=prob, cons=cons, dual=dual,
        result=result, poly=poly, report=report, resolved=cfg,
    )


def run_compare(cfg, methods, capacity=config.DEFAULT_CAPACITY):
    """Run several solvers against a long r-FISTA reference minimizer.

    Returns (c_ref, per-method dict with result/distances or error).
    """
    if len(methods) < 2:
        raise ConfigError("compare needs at least two methods")
    tf, ms, prob, cons, dual = build_problem(cfg, capacity)
    base = config.build_solver_config(cfg["solver"])
    step = base.step if base.step is not None else dual.default_step

    ref_cfg = replace(
        base, method="rfista", step=step, max_iter=REFERENCE_ITERATIONS,
        primal_change_tol=0.0, stall_checks=10 * REFERENCE_ITERATIONS,
        keep_primal_history=False, trace_every=REFERENCE_ITERATIONS,
    )
    c_ref = solvers.solve_rfista(dual, ref_cfg).c_star

    outcomes = {}
    budget = min(base.max_iter, REFERENCE_ITERATIONS)
    for method in methods:
        mcfg = replace(
            base, method=method, step=step, max_iter=budget,
            keep_primal_history=True,
        )
        try:
            result = solvers.solve(dual, mcfg, prob, cons)
        except PospolyError as exc:
            outcomes[method] = {"error": str(exc)}
            continue
        ks = [k for k, _ in result.primal_history]
        dists = metrics.convergence_distance(result.primal_history, c_ref)
        outcomes[method] = {
            "result": result,
            "distances": list(zip(ks, dists)),
        }
    return c_ref, outcomes


SWEEP_PARAMS = ("C", "K", "n", "d")


def _config_for_value(cfg, param, value):
    mod = copy.deepcopy(cfg)
    value = int(value)
    if param == "C":
        pts = mod["constraints"]["points"]
        if pts["kind"] == "tensor_grid":
            raise ConfigError("C-sweep needs a count-based constraint sampler")
        pts["count"] = value
    elif param == "K":
        pts = mod["fit_samples"]
        if pts["kind"] == "tensor_grid":
            raise ConfigError("K-sweep needs a count-based fit sampler")
        pts["count"] = value
    elif param == "n":
        mod["basis"]["degree"] = value
    elif param == "d":
        mod["function"]["d"] = value
        # per-dimension parameters are re-broadcast for the new d
        fn = mod["function"]
        if fn["kind"] in functions.PEAK_KINDS:
            tf = functions.make_test_function(
                fn["kind"], value,
                sigma=fn["sigma"][0] if fn.get("sigma") else None,
                omega=fn["omega"][0] if fn.get("omega") else None,
            )
            fn["sigma"] = [float(v) for v in tf.sigma]
            if tf.omega is not None:
                fn["omega"] = [float(v) for v in tf.omega]
    else:
        raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    # fresh deterministic sub-seed stream per sweep value
    mod["seed"] = config.derive_seed(cfg["seed"], f"sweep:{param}={value}")
    return mod


def run_sweep(cfg, param, values, capacity=config.DEFAULT_CAPACITY):
    """One fit per value; failures are recorded as rows, not raised."""
    if param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    if not values:
        raise ConfigError("sweep needs a non-empty value list")
    if sorted(values) != list(values):
        raise ConfigError("sweep values must be sorted ascending")
    rows = []
    for value in values:
        try:
            outcome = run_fit(_config_for_value(cfg, param, value), capacity)
            rows.append({
                "param": param,
                "value": value,
                "l2_error": outcome.report.l2_error,
                "negative_fraction": outcome.report.negative_fraction,
                "iterations": outcome.result.iterations,
                "status": outcome.result.status,
            })
        except PospolyError:
            rows.append({
                "param": param,
                "value": value,
                "l2_error": float("nan"),
                "negative_fraction": float("nan"),
                "iterations": 0,
                "status": "error",
            })
    return rows
