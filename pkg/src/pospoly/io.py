"""File output helpers: atomic writes, CSV/JSON serialization.

All CSV files are comma-separated with a single header row; floats are
written with 17 significant digits so values round-trip exactly.
"""
import json
import os
import tempfile

import numpy as np


def fmt(x):
    """Format a float with 17 significant digits."""
    return format(float(x), ".17g")


def atomic_write_text(path, text):
    """Write text to path via a temp file + rename, so readers never see
    a partially written file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, doc):
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_trace_csv(trace, path, include_timing=True):
    """Export a SolverTrace. With include_timing=False the elapsed_s column
    is zeroed so repeated runs produce byte-identical files."""
    lines = ["k,dual_objective,primal_change,max_violation,restarted,elapsed_s"]
    for i in range(len(trace)):
        elapsed = trace.elapsed_s[i] if include_timing else 0.0
        lines.append(
            f"{trace.k[i]},{fmt(trace.dual_objective[i])},"
            f"{fmt(trace.primal_change[i])},{fmt(trace.max_violation[i])},"
            f"{int(trace.restarted[i])},{fmt(elapsed)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_samples_csv(samples, path, meta_path=None):
    """Write a SampleSet: one point per row plus a sidecar metadata JSON."""
    d = samples.dim
    lines = [",".join(f"x{j + 1}" for j in range(d))]
    for row in samples.points:
        lines.append(",".join(fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")
    if meta_path is None:
        meta_path = os.path.splitext(path)[0] + ".meta.json"
    write_json(meta_path, samples.metadata())


def read_points_csv(path):
    """Read a points CSV (header x1..xd); returns a (K, d) array."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header or not header.split(",")[0].startswith("x"):
            raise ValueError(f"{path} does not look like a points CSV")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return data


def write_values_csv(values, path):
    lines = ["value"]
    lines.extend(fmt(v) for v in values)
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(rows, path):
    """rows: iterable of dicts with keys param, value, l2_error,
    negative_fraction, iterations, status."""
    lines = ["param,value,l2_error,negative_fraction,iterations,status"]
    for r in rows:
        lines.append(
            f"{r['param']},{fmt(r['value'])},{fmt(r['l2_error'])},"
            f"{fmt(r['negative_fraction'])},{r['iterations']},{r['status']}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_distances_csv(per_method, path):
    """per_method: dict method -> list of (k, distance)."""
    lines = ["method,k,distance"]
    for method, series in per_method.items():
        for k, dist in series:
            lines.append(f"{method},{k},{fmt(dist)}")
    atomic_write_text(path, "\n".join(lines) + "\n")
