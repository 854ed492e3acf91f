"""Benchmark the compiled basis-evaluation kernels against the numpy fallback.

Times legendre_table and vandermonde_from_tables over a grid of problem
sizes, verifies the two backends agree bit-for-bit, and prints a speedup
table.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from pospoly import _kernels_py, basis

try:
    from pospoly import _fastkernels
except ImportError:
    _fastkernels = None


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(d, n, K, repeat):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.0, 1.0, (K, d))
    ms = basis.total_degree_indices(d, n)
    tables = np.empty((d, n + 1, K))
    for j in range(d):
        col = np.ascontiguousarray(pts[:, j])
        tables[j] = _kernels_py.legendre_table(n, col)

    x = np.ascontiguousarray(pts[:, 0])
    t_py_tab = best_of(lambda: _kernels_py.legendre_table(n, x), repeat)
    t_py_van = best_of(
        lambda: _kernels_py.vandermonde_from_tables(ms.indices, tables), repeat
    )
    row = {
        "case": f"d={d} n={n} K={K} (N={ms.size})",
        "table_py": t_py_tab,
        "vander_py": t_py_van,
    }
    if _fastkernels is not None:
        np.testing.assert_array_equal(
            _fastkernels.legendre_table(n, x), _kernels_py.legendre_table(n, x)
        )
        np.testing.assert_array_equal(
            _fastkernels.vandermonde_from_tables(ms.indices, tables),
            _kernels_py.vandermonde_from_tables(ms.indices, tables),
        )
        row["table_cy"] = best_of(lambda: _fastkernels.legendre_table(n, x), repeat)
        row["vander_cy"] = best_of(
            lambda: _fastkernels.vandermonde_from_tables(ms.indices, tables),
            repeat,
        )
    return row


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="take the best of this many runs")
    args = parser.parse_args()

    cases = [
        (1, 20, 10_000),
        (1, 50, 100_000),
        (2, 20, 5_000),
        (3, 10, 5_000),
        (10, 3, 2_000),
        (10, 5, 2_000),
        (25, 2, 2_000),
    ]
    if _fastkernels is None:
        print("compiled extension not available; timing the fallback only")
    header = f"{'case':<28}{'op':<12}{'python':>10}{'cython':>10}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for d, n, K in cases:
        row = bench_case(d, n, K, args.repeat)
        for op, py_key, cy_key in (
            ("table", "table_py", "table_cy"),
            ("vandermonde", "vander_py", "vander_cy"),
        ):
            py = row[py_key]
            if cy_key in row:
                cy = row[cy_key]
                print(f"{row['case']:<28}{op:<12}{py * 1e3:>8.2f}ms"
                      f"{cy * 1e3:>8.2f}ms{py / cy:>8.1f}x")
            else:
                print(f"{row['case']:<28}{op:<12}{py * 1e3:>8.2f}ms"
                      f"{'-':>10}{'-':>9}")
    print("\nbackends agree bit-for-bit on every case above"
          if _fastkernels is not None else "")


if __name__ == "__main__":
    main()
