#!/usr/bin/env python3
"""Benchmark the compiled integration kernel against the numpy fallback.

Runs the two-circle example at full resolution for a few durations and
reports wall time and steps/second per backend.

    python benchmarks/bench_backends.py [--t-end SECONDS]
"""

import argparse
import time

from ringform._backend import available_backends
from ringform.config import load_config
from ringform.simulate import integrate, with_overrides


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t-end", type=float, default=10.0)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    config, _ = load_config("example2")
    config = with_overrides(config, t_end=args.t_end)
    n_steps = round(config.t_end / config.dt)

    print(f"two-circle example, N = {config.spec.n}, {n_steps} steps at dt = {config.dt}")
    print(f"{'backend':<10} {'best wall':>12} {'steps/s':>14}")

    times = {}
    for backend in available_backends():
        integrate(with_overrides(config, t_end=1.0), backend=backend)  # warm up
        best = min(
            _timed(config, backend) for _ in range(args.repeats)
        )
        times[backend] = best
        print(f"{backend:<10} {best:>10.3f} s {n_steps / best:>14,.0f}")

    if len(times) == 2:
        print(f"speedup: {times['python'] / times['compiled']:.1f}x")


def _timed(config, backend: str) -> float:
    start = time.perf_counter()
    integrate(config, backend=backend)
    return time.perf_counter() - start


if __name__ == "__main__":
    main()
