"""Compare the compiled and pure-python replicate kernels.

Times draw_evacuees on problem sizes bracketing the bundled snapshot
(2,434 block groups, 254 counties, 2,000 replicates) and verifies the two
kernels stay bit-identical on every timed input.

Usage: python3 benchmarks/bench_kernel.py [--replicates N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from stormflux.mc import available_kernels, draw_evacuees

SIZES = (
    ("toy", 5, 3),
    ("county-scale", 300, 25),
    ("snapshot-scale", 2_434, 254),
    ("state-scale", 10_000, 254),
)


def make_inputs(rng, n_cbg, n_counties):
    a = rng.uniform(0.5, 30.0, size=n_cbg)
    b = rng.uniform(0.5, 30.0, size=n_cbg)
    persons = rng.integers(200, 6_000, size=n_cbg).astype(float)
    county_of = rng.integers(0, n_counties, size=n_cbg)
    return a, b, persons, county_of


def bench(kernel, inputs, n_counties, replicates, repeats=3):
    a, b, persons, county_of = inputs
    best = float("inf")
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = draw_evacuees(a, b, persons, county_of, n_counties,
                            replicates, seed=20200826, kernel=kernel)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replicates", type=int, default=2_000)
    args = parser.parse_args()

    kernels = available_kernels()
    print(f"kernels available: {', '.join(kernels)}")
    print(f"replicates: {args.replicates}\n")
    header = f"{'case':<16} {'block groups':>12} {'counties':>9}"
    for k in kernels:
        header += f" {k + ' (s)':>14}"
    if len(kernels) == 2:
        header += f" {'speedup':>9} {'identical':>10}"
    print(header)

    rng = np.random.default_rng(7)
    for name, n_cbg, n_counties in SIZES:
        inputs = make_inputs(rng, n_cbg, n_counties)
        row = f"{name:<16} {n_cbg:>12,} {n_counties:>9,}"
        results = {}
        for k in kernels:
            seconds, out = bench(k, inputs, n_counties, args.replicates)
            results[k] = (seconds, out)
            row += f" {seconds:>14.4f}"
        if len(kernels) == 2:
            py_s, py_out = results["python"]
            cy_s, cy_out = results["compiled"]
            same = bool(np.array_equal(py_out, cy_out))
            row += f" {py_s / cy_s:>8.2f}x {str(same):>10}"
            if not same:
                raise SystemExit(f"{name}: kernel outputs diverged")
        print(row)


if __name__ == "__main__":
    main()
