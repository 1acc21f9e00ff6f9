#!/usr/bin/env python3
"""Benchmark the oracle grid scan: compiled kernel vs numpy fallback.

The scan is the package's hot loop (resolution^4 objective evaluations per
channel).  This script times both backends on the same workload and checks
that they return identical results.

Usage: python benchmarks/bench_oracle.py [--resolution 64] [--samples 10]
"""

import argparse
import math
import time

import numpy as np

from b92sec import _gridref
from b92sec.evebound import build_matrices

try:
    from b92sec import _gridcore
except ImportError:
    _gridcore = None


def workload(samples: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(samples):
        alpha = rng.uniform(math.radians(3), math.radians(80))
        theta = rng.uniform(math.radians(-30), math.radians(30))
        eps = rng.uniform(0.02, 0.9)
        a, b = build_matrices(alpha, theta, eps)
        target = rng.uniform(0.0, 0.9) * math.hypot(b.m11 - b.m22, 2 * b.m12)
        cases.append((a, b, target))
    return cases


def run(scan, cases, resolution):
    start = time.perf_counter()
    values = []
    for a, b, target in cases:
        slack = 10.0 * 2.0 / (resolution - 1)
        best, _, _ = scan(a.m11, a.m12, a.m22, b.m11, b.m12, b.m22,
                          target - slack, target + slack, resolution, 10)
        values.append(best)
    return time.perf_counter() - start, values


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--resolution", type=int, default=64)
    parser.add_argument("--samples", type=int, default=10)
    args = parser.parse_args()

    cases = workload(args.samples)
    cells = args.resolution ** 4

    t_np, v_np = run(_gridref.scan, cases, args.resolution)
    per_np = t_np / args.samples
    print(f"numpy fallback : {t_np:8.2f}s total  "
          f"{per_np * 1e3:8.1f} ms/scan  "
          f"{cells / per_np / 1e6:8.1f} Mcells/s")

    if _gridcore is None:
        print("compiled kernel: not built (pip install -e . to build)")
        return

    t_c, v_c = run(_gridcore.scan, cases, args.resolution)
    per_c = t_c / args.samples
    print(f"compiled kernel: {t_c:8.2f}s total  "
          f"{per_c * 1e3:8.1f} ms/scan  "
          f"{cells / per_c / 1e6:8.1f} Mcells/s")
    print(f"speedup        : {t_np / t_c:8.2f}x")

    if not all(a == b for a, b in zip(v_np, v_c)):
        raise SystemExit("backend results differ!")
    print("results identical across backends")


if __name__ == "__main__":
    main()
