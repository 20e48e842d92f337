#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Builds a desk-scale synthetic corpus, then times the two hot stages of the
pipeline (window network construction and per-window engagement metrics)
under each available kernel backend.

    python benchmarks/bench_kernels.py [--users N] [--rate R] [--windows W]
"""

from __future__ import annotations

import argparse
import random
import time

from chatpulse import (
    WindowSpec,
    _kernels,
    build_ensemble,
    conversation_metrics,
)
from chatpulse.synth import Regime, generate


def time_stage(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def micro_bench() -> None:
    """Kernels in isolation, without the surrounding pipeline overhead."""
    rng = random.Random(1)
    sequences = [
        [rng.randrange(40) for _ in range(200)] for _ in range(2000)
    ]
    weight_sets = [
        [rng.randrange(1, 100) for _ in range(48)] for _ in range(2000)
    ]
    print("kernel micro-benchmark (2000 calls each):")
    print(f"{'backend':<10} {'pair_counts (s)':>16} {'gini (s)':>12}")
    for backend in _kernels.available_backends():
        mod = _kernels.backend_module(backend)
        pairs_s = time_stage(
            lambda: [mod.pair_counts(s) for s in sequences]
        )
        gini_s = time_stage(
            lambda: [mod.gini_sorted(w) for w in weight_sets]
        )
        print(f"{backend:<10} {pairs_s:>16.4f} {gini_s:>12.4f}")
    print()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--users", type=int, default=600)
    parser.add_argument("--rate", type=int, default=6, help="messages per window")
    parser.add_argument("--windows", type=int, default=12_960, help="90 days of 10-minute bins")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    regime = Regime(
        kind="uniform-random", users=args.users, rate=args.rate,
        windows=args.windows, seed=args.seed,
    )
    result = generate(regime)
    spec = WindowSpec()
    print(
        f"corpus: {len(result.log.events)} messages, {args.users} users, "
        f"{args.windows} windows"
    )
    print(f"available backends: {', '.join(_kernels.available_backends())}\n")

    micro_bench()

    rows = []
    default = _kernels.BACKEND
    for backend in _kernels.available_backends():
        _kernels.use_backend(backend)
        build_s = time_stage(lambda: build_ensemble(result.log, spec), args.repeats)
        ens = build_ensemble(result.log, spec)
        metrics_s = time_stage(lambda: conversation_metrics(ens), args.repeats)
        rows.append((backend, build_s, metrics_s))
    _kernels.use_backend(default)

    print(f"{'backend':<10} {'build (s)':>12} {'metrics (s)':>12} {'total (s)':>12}")
    for backend, build_s, metrics_s in rows:
        print(f"{backend:<10} {build_s:>12.4f} {metrics_s:>12.4f} "
              f"{build_s + metrics_s:>12.4f}")
    if len(rows) == 2:
        pure = next(r for r in rows if r[0] == "pure")
        native = next(r for r in rows if r[0] == "native")
        speedup = (pure[1] + pure[2]) / (native[1] + native[2])
        print(f"\nnative speedup over pure: {speedup:.2f}x")


if __name__ == "__main__":
    main()
