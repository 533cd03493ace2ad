#!/usr/bin/env python3
"""Benchmark the compiled Monte Carlo kernel against the pure-Python one.

Both kernels implement the same contract and must produce bit-identical
results; this script verifies that on the benchmark workload and reports
the throughput of each.

    python benchmarks/bench_kernels.py [--trials N] [--horizon H] [--pop N]
"""

import argparse
import time

import numpy as np

from ecodiv import make_community
from ecodiv.survival import _mc_py, initial_counts

try:
    from ecodiv.survival import _mc_cy
except ImportError:
    _mc_cy = None


def run_kernel(kernel, counts0, args):
    s = len(counts0)
    steps = args.horizon + 1
    extinct = np.zeros(s, dtype=np.int64)
    tte = np.zeros(s, dtype=np.int64)
    alive2 = np.zeros(steps, dtype=np.int64)
    div = np.zeros(steps, dtype=np.float64)
    start = time.perf_counter()
    kernel.run_chunk(
        counts0, args.pop, args.shock_rate, args.kill_fraction, args.targeting,
        args.horizon, args.seed, 0, args.trials, extinct, tte, alive2, div,
    )
    elapsed = time.perf_counter() - start
    return elapsed, (extinct, tte, alive2, div)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=500)
    parser.add_argument("--horizon", type=int, default=400)
    parser.add_argument("--pop", type=int, default=100)
    parser.add_argument("--shock-rate", type=float, default=0.2)
    parser.add_argument("--kill-fraction", type=float, default=0.5)
    parser.add_argument("--targeting", type=float, default=2.0)
    parser.add_argument("--seed", type=int, default=12345)
    args = parser.parse_args()

    community = make_community(
        "bench", [("a", 0.4), ("b", 0.3), ("c", 0.2), ("d", 0.1)]
    )
    counts0 = initial_counts(community, args.pop)
    print(
        f"workload: {args.trials} trials x {args.horizon} steps, "
        f"N={args.pop}, shock_rate={args.shock_rate}, "
        f"kill_fraction={args.kill_fraction}, targeting={args.targeting}"
    )

    t_py, out_py = run_kernel(_mc_py, counts0, args)
    print(f"python kernel:   {t_py:8.3f} s  ({args.trials / t_py:10.1f} trials/s)")

    if _mc_cy is None:
        print("compiled kernel: not built (pip install -e . builds it)")
        return 0

    t_cy, out_cy = run_kernel(_mc_cy, counts0, args)
    print(f"compiled kernel: {t_cy:8.3f} s  ({args.trials / t_cy:10.1f} trials/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    identical = all(np.array_equal(a, b) for a, b in zip(out_py, out_cy))
    print(f"outputs bit-identical: {identical}")
    return 0 if identical else 1


if __name__ == "__main__":
    raise SystemExit(main())
