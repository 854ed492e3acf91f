"""Experiment configuration: strict YAML parsing, defaults, seed splitting.

A config file is fully self-describing: re-running it reproduces all
outputs byte-identically. Unknown keys are rejected so typos fail loudly.
"""
import hashlib

import yaml

from . import functions
from .errors import CapacityError, ConfigError
from .problem import DEFAULT_ALPHA, DEFAULT_EPSILON
from .solvers import METHODS, RESTART_RULES, SolverConfig

# Refuse assemblies where K*N or N*C exceeds this many entries unless --force.
DEFAULT_CAPACITY = 200_000_000

_TOP_KEYS = {
    "function", "basis", "fit_samples", "constraints", "solver",
    "evaluation", "alpha", "output_dir", "seed",
}
_FUNCTION_KEYS = {"kind", "d", "sigma", "omega"}
_BASIS_KEYS = {"degree"}
_SAMPLER_KEYS = {"kind", "count", "per_dim", "seed"}
_CONSTRAINT_KEYS = {"mode", "points", "epsilon", "bounds"}
_SOLVER_KEYS = {
    "method", "step", "max_iter", "restart_rule", "restart_period",
    "dr_lambda", "dr_gamma", "pdhg_mu", "pdhg_tau0", "pdhg_eta0",
    "primal_check_interval", "primal_change_tol", "trace_every",
}
_EVAL_KEYS = {"test"}
_SAMPLER_KINDS = {"chebyshev", "equidistant", "uniform_random", "tensor_grid"}


def derive_seed(global_seed, component):
    """Deterministic 64-bit sub-seed: SHA-256 of 'seed:component'."""
    digest = hashlib.sha256(f"{global_seed}:{component}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _check_keys(section, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in section {section!r}; "
            f"allowed: {sorted(allowed)}"
        )


def _resolve_sampler(spec, section):
    _check_keys(section, spec, _SAMPLER_KEYS)
    kind = spec.get("kind")
    if kind not in _SAMPLER_KINDS:
        raise ConfigError(
            f"{section}.kind must be one of {sorted(_SAMPLER_KINDS)}, got {kind!r}"
        )
    out = {"kind": kind}
    if kind == "tensor_grid":
        if "per_dim" not in spec:
            raise ConfigError(f"{section} needs per_dim for tensor_grid")
        out["per_dim"] = int(spec["per_dim"])
    else:
        if "count" not in spec:
            raise ConfigError(f"{section} needs a count")
        out["count"] = int(spec["count"])
    if kind == "uniform_random":
        # explicit seed wins; otherwise derived from the global seed later
        out["seed"] = int(spec["seed"]) if spec.get("seed") is not None else None
    elif spec.get("seed") is not None:
        raise ConfigError(f"{section}: seed only applies to uniform_random")
    return out


def load_config(path):
    """Load and validate a YAML experiment config; returns the resolved dict
    with all defaults materialized."""
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return resolve_config(raw)


def resolve_config(raw):
    """Validate a config mapping and materialize every default."""
    _check_keys("<top level>", raw, _TOP_KEYS)
    for required in ("function", "basis", "fit_samples", "constraints"):
        if required not in raw:
            raise ConfigError(f"missing required section {required!r}")

    fn = dict(raw["function"])
    _check_keys("function", fn, _FUNCTION_KEYS)
    kind = fn.get("kind")
    if kind not in functions.KINDS:
        raise ConfigError(
            f"function.kind must be one of {sorted(functions.KINDS)}, got {kind!r}"
        )
    d = int(fn.get("d", 1))
    if d < 1:
        raise ConfigError("function.d must be >= 1")
    resolved_fn = {"kind": kind, "d": d}
    if kind in functions.PEAK_KINDS:
        tf = functions.make_test_function(
            kind, d, sigma=fn.get("sigma"), omega=fn.get("omega")
        )
        resolved_fn["sigma"] = [float(v) for v in tf.sigma]
        if tf.omega is not None:
            resolved_fn["omega"] = [float(v) for v in tf.omega]
    elif fn.get("sigma") is not None or fn.get("omega") is not None:
        raise ConfigError(f"function kind {kind!r} takes no sigma/omega")

    bs = dict(raw["basis"])
    _check_keys("basis", bs, _BASIS_KEYS)
    if "degree" not in bs:
        raise ConfigError("basis.degree is required")
    degree = int(bs["degree"])
    if degree < 0:
        raise ConfigError("basis.degree must be >= 0")

    fit_samples = _resolve_sampler(dict(raw["fit_samples"]), "fit_samples")

    cons = dict(raw["constraints"])
    _check_keys("constraints", cons, _CONSTRAINT_KEYS)
    mode = cons.get("mode", "nonneg")
    if mode not in ("nonneg", "bounded"):
        raise ConfigError("constraints.mode must be 'nonneg' or 'bounded'")
    if "points" not in cons:
        raise ConfigError("constraints.points is required")
    resolved_cons = {
        "mode": mode,
        "points": _resolve_sampler(dict(cons["points"]), "constraints.points"),
        "epsilon": float(cons.get("epsilon", DEFAULT_EPSILON)),
    }
    if mode == "bounded":
        bounds = cons.get("bounds", [0.0, 1.0])
        if not (isinstance(bounds, (list, tuple)) and len(bounds) == 2):
            raise ConfigError("constraints.bounds must be a [lower, upper] pair")
        resolved_cons["bounds"] = [float(bounds[0]), float(bounds[1])]
    elif cons.get("bounds") is not None:
        raise ConfigError("constraints.bounds only applies to bounded mode")

    sv = dict(raw.get("solver", {}))
    _check_keys("solver", sv, _SOLVER_KEYS)
    solver_cfg = build_solver_config(sv)
    resolved_sv = {
        "method": solver_cfg.method,
        "step": solver_cfg.step,
        "max_iter": solver_cfg.max_iter,
        "restart_rule": solver_cfg.restart_rule,
        "restart_period": solver_cfg.restart_period,
        "dr_lambda": solver_cfg.dr_lambda,
        "dr_gamma": solver_cfg.dr_gamma,
        "pdhg_mu": solver_cfg.pdhg_mu,
        "pdhg_tau0": solver_cfg.pdhg_tau0,
        "pdhg_eta0": solver_cfg.pdhg_eta0,
        "primal_check_interval": solver_cfg.primal_check_interval,
        "primal_change_tol": solver_cfg.primal_change_tol,
        "trace_every": solver_cfg.trace_every,
    }

    ev = dict(raw.get("evaluation", {}))
    _check_keys("evaluation", ev, _EVAL_KEYS)
    if "test" in ev:
        resolved_ev = {"test": _resolve_sampler(dict(ev["test"]), "evaluation.test")}
    else:
        # paper-style defaults: 1e4 equispaced points in 1-D, 5000 random
        # points otherwise
        if d == 1:
            resolved_ev = {"test": {"kind": "equidistant", "count": 10_000}}
        else:
            resolved_ev = {
                "test": {"kind": "uniform_random", "count": 5000, "seed": None}
            }

    return {
        "function": resolved_fn,
        "basis": {"degree": degree},
        "fit_samples": fit_samples,
        "constraints": resolved_cons,
        "solver": resolved_sv,
        "evaluation": resolved_ev,
        "alpha": float(raw.get("alpha", DEFAULT_ALPHA)),
        "output_dir": str(raw.get("output_dir", "out")),
        "seed": int(raw.get("seed", 0)),
    }


def build_solver_config(mapping):
    """Build a SolverConfig from a (validated) solver section mapping."""
    kwargs = {}
    for key in _SOLVER_KEYS:
        if mapping.get(key) is not None:
            kwargs[key] = mapping[key]
    if "method" in kwargs and kwargs["method"] not in METHODS:
        raise ConfigError(f"unknown solver method {kwargs['method']!r}")
    if "restart_rule" in kwargs and kwargs["restart_rule"] not in RESTART_RULES:
        raise ConfigError(f"unknown restart rule {kwargs['restart_rule']!r}")
    for int_key in ("max_iter", "restart_period", "primal_check_interval",
                    "trace_every"):
        if int_key in kwargs:
            kwargs[int_key] = int(kwargs[int_key])
    for float_key in ("step", "dr_lambda", "dr_gamma", "pdhg_mu", "pdhg_tau0",
                      "pdhg_eta0", "primal_change_tol"):
        if float_key in kwargs:
            kwargs[float_key] = float(kwargs[float_key])
    return SolverConfig(**kwargs)


def build_samples(spec, dim, global_seed, component):
    """Materialize a sampler spec into a SampleSet.

    uniform_random without an explicit seed gets a deterministic sub-seed
    derived from the global seed and the component name.
    """
    kind = spec["kind"]
    if kind == "chebyshev":
        if dim != 1:
            raise ConfigError("chebyshev sampling is one-dimensional")
        return functions.chebyshev_nodes(spec["count"])
    if kind == "equidistant":
        if dim != 1:
            raise ConfigError("equidistant sampling is one-dimensional")
        return functions.equidistant(spec["count"])
    if kind == "tensor_grid":
        return functions.tensor_grid(spec["per_dim"], dim)
    seed = spec.get("seed")
    if seed is None:
        seed = derive_seed(global_seed, component)
    return functions.uniform_random(spec["count"], dim, seed)


def check_capacity(n_fit, n_basis, n_cons, capacity=DEFAULT_CAPACITY):
    if n_fit * n_basis > capacity:
        raise CapacityError(
            f"fit matrix needs {n_fit * n_basis} entries "
            f"(> {capacity}); pass --force to proceed"
        )
    if n_cons * n_basis > capacity:
        raise CapacityError(
            f"constraint matrix needs {n_cons * n_basis} entries "
            f"(> {capacity}); pass --force to proceed"
        )
