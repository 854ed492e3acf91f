"""Command-line experiment runner.

Subcommands: fit, eval, compare, sweep, gen-points. All outputs are
plot-ready CSV/JSON; every JSON result embeds the fully resolved config so
a run can be reproduced from its own outputs.

Exit codes: 0 success/converged, 1 configuration or input error,
2 solver hit max_iter or stalled, 3 capacity ceiling exceeded.
"""
import argparse
import os
import sys

import numpy as np

from . import config, experiments, functions, io
from .errors import CapacityError, ConfigError, PospolyError
from .problem import PolynomialModel

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NOT_CONVERGED = 2
EXIT_CAPACITY = 3

FORCED_CAPACITY = 10**18


def _say(args, message):
    if not args.quiet:
        print(message)


def _load(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = config.load_config(args.config)
    if args.output_dir is not None:
        cfg["output_dir"] = args.output_dir
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _capacity(args):
    return FORCED_CAPACITY if args.force else config.DEFAULT_CAPACITY


def cmd_fit(args):
    cfg = _load(args)
    outcome = experiments.run_fit(cfg, capacity=_capacity(args))
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)

    provenance = {
        "config": cfg,
        "constraints": outcome.cons.provenance,
        "solver": {
            "method": outcome.result.method,
            "status": outcome.result.status,
            "iterations": outcome.result.iterations,
            "restart_count": outcome.result.restart_count,
            "step": outcome.result.step,
        },
    }
    io.write_json(
        os.path.join(out, "model.json"),
        outcome.poly.to_dict(alpha=cfg["alpha"], provenance=provenance),
    )
    # elapsed_s is zeroed so reruns of the same config are byte-identical
    io.write_trace_csv(
        outcome.result.trace, os.path.join(out, "trace.csv"),
        include_timing=False,
    )
    report_doc = dict(outcome.report.to_dict())
    report_doc.update({
        "status": outcome.result.status,
        "iterations": outcome.result.iterations,
        "restart_count": outcome.result.restart_count,
        "method": outcome.result.method,
        "config": cfg,
    })
    io.write_json(os.path.join(out, "report.json"), report_doc)

    _say(args, f"status={outcome.result.status} "
               f"iterations={outcome.result.iterations} "
               f"l2_error={outcome.report.l2_error:.3e} "
               f"negative_fraction={outcome.report.negative_fraction:.4f}")
    return EXIT_OK if outcome.result.status == "converged" else EXIT_NOT_CONVERGED


def cmd_eval(args):
    doc = io.read_json(args.model)
    poly = PolynomialModel.from_dict(doc)
    points = io.read_points_csv(args.points)
    if points.shape[1] != poly.index_set.dim:
        print(
            f"error: points have dimension {points.shape[1]}, model expects "
            f"{poly.index_set.dim}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    values = poly(points)
    io.write_values_csv(values, args.output)
    _say(args, f"wrote {len(values)} values to {args.output}")
    return EXIT_OK


def cmd_compare(args):
    cfg = _load(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    c_ref, outcomes = experiments.run_compare(
        cfg, methods, capacity=_capacity(args)
    )
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)

    distances = {}
    summary = {"config": cfg, "methods": {}}
    any_ok = False
    for method, data in outcomes.items():
        if "error" in data:
            summary["methods"][method] = {"status": "error", "error": data["error"]}
            continue
        any_ok = True
        result = data["result"]
        distances[method] = data["distances"]
        io.write_trace_csv(
            result.trace, os.path.join(out, f"trace_{method}.csv"),
            include_timing=False,
        )
        summary["methods"][method] = {
            "status": result.status,
            "iterations": result.iterations,
            "restart_count": result.restart_count,
            "final_distance": data["distances"][-1][1]
            if data["distances"] else None,
        }
    io.write_distances_csv(distances, os.path.join(out, "distances.csv"))
    io.write_json(os.path.join(out, "summary.json"), summary)
    for method, info in summary["methods"].items():
        _say(args, f"{method}: {info}")
    return EXIT_OK if any_ok else EXIT_NOT_CONVERGED


def cmd_sweep(args):
    cfg = _load(args)
    values = [int(v) for v in args.values.split(",") if v.strip()]
    rows = experiments.run_sweep(cfg, args.param, values,
                                 capacity=_capacity(args))
    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    io.write_sweep_csv(rows, os.path.join(out, "sweep.csv"))
    for r in rows:
        _say(args, f"{r['param']}={r['value']}: iterations={r['iterations']} "
                   f"status={r['status']}")
    return EXIT_OK


def cmd_gen_points(args):
    dim = args.dim
    if args.kind == "chebyshev":
        samples = functions.chebyshev_nodes(args.count)
    elif args.kind == "equidistant":
        samples = functions.equidistant(args.count)
    elif args.kind == "tensor_grid":
        samples = functions.tensor_grid(args.per_dim, dim)
    elif args.kind == "uniform_random":
        seed = args.seed if args.seed is not None else 0
        samples = functions.uniform_random(args.count, dim, seed)
    else:
        raise ConfigError(f"unknown sampler kind {args.kind!r}")
    io.write_samples_csv(samples, args.output)
    _say(args, f"wrote {len(samples)} points to {args.output}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pospoly",
        description="Least-squares polynomial approximation with pointwise "
                    "non-negativity or bound constraints.",
    )
    parser.add_argument("--config", help="YAML experiment config")
    parser.add_argument("--output-dir", help="override the config output_dir")
    parser.add_argument("--seed", type=int, help="override the global seed")
    parser.add_argument("--force", action="store_true",
                        help="lift the capacity ceiling on matrix sizes")
    parser.add_argument("--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a constrained polynomial per config")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("eval", help="evaluate a saved model at points")
    p.add_argument("model", help="model.json from a fit run")
    p.add_argument("points", help="points CSV (header x1..xd)")
    p.add_argument("-o", "--output", default="values.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="compare solvers against an r-FISTA "
                                       "reference minimizer")
    p.add_argument("--methods", required=True,
                   help="comma-separated method names")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="sweep one parameter, one fit per value")
    p.add_argument("--param", required=True, choices=experiments.SWEEP_PARAMS)
    p.add_argument("--values", required=True,
                   help="comma-separated ascending integers")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen-points", help="generate a sample-point file")
    p.add_argument("--kind", required=True,
                   choices=["chebyshev", "equidistant", "uniform_random",
                            "tensor_grid"])
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--per-dim", type=int, default=2, dest="per_dim")
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("-o", "--output", default="points.csv")
    p.set_defaults(func=cmd_gen_points)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PospolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
