#!/usr/bin/env python3
"""Benchmark the full-scale match: 1378 x 784 elements, ~10^6 pairs.

Usage: python scripts/run_scale_benchmark.py [--seed N] [--repeats K]
"""

import argparse
import time

import numpy as np

from schemamatch.engine import match
from schemamatch.synth import synthetic_pair


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=1)
    args = parser.parse_args()

    left, right = synthetic_pair(seed=args.seed)
    print(f"left: {left.element_count} elements, right: {right.element_count} elements")
    for i in range(args.repeats):
        started = time.perf_counter()
        matrix = match(left, right)
        elapsed = time.perf_counter() - started
        above = int((matrix.scores >= matrix.config.threshold).sum())
        print(
            f"run {i + 1}: {matrix.pair_count} pairs in {elapsed:.2f} s "
            f"({matrix.pair_count / elapsed / 1e6:.2f} M pairs/s); "
            f"score range [{matrix.scores.min():+.3f}, {matrix.scores.max():+.3f}], "
            f"{above} pairs >= {matrix.config.threshold}"
        )
        assert np.all(np.abs(matrix.scores) < 1.0)


if __name__ == "__main__":
    main()
