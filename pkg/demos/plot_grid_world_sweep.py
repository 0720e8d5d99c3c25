"""
Exact versus cardinality-capped allocation on the grid world
============================================================

Generates walks on the 10x10 grid, solves each one exactly and with at most
``mbar`` ads, and prints run time and approximation ratio per cell.  A
smaller version of the ``geoad bench-single`` sweep.
"""

import statistics

import numpy as np

from geoad import bench

############################################################
# A quick sweep: 10 seeds at two path lengths and two lambdas

sweep = bench.SingleSweep(cells=((0.5, 10), (0.5, 15), (0.8, 10)),
                          seeds=tuple(range(10)), mbars=(1, 2, 3))
rows = bench.bench_single_path(sweep)

############################################################
# Aggregate per cell

for agg in bench.aggregate(rows):
    m = "" if agg.mbar is None else f" mbar={agg.mbar}"
    print(f"{agg.algorithm:>3}{m:<8} N={agg.size:<3} lambda={agg.lam}  "
          f"median {agg.median_runtime_ms:8.1f} ms  AAR {agg.aar:.3f}")

############################################################
# The worst instance for mbar=2

two = [r for r in rows if r.algorithm == "fa" and r.mbar == 2]
worst = min(two, key=lambda r: r.approx_ratio)
print("worst ratio", round(worst.approx_ratio, 3), "seed", worst.seed, "lambda", worst.lam)
print("spread", np.round(np.percentile([r.approx_ratio for r in two], [10, 50, 90]), 3))
print("mean", round(statistics.fmean(r.approx_ratio for r in two), 3))
