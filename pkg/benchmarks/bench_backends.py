#!/usr/bin/env python3
"""Time the compiled kernels against their pure-numpy fallbacks.

Both implementations of each kernel are importable regardless of which one
the package dispatches to, so this script races them in one process:

    python3 benchmarks/bench_backends.py --events 10000000

The simulator benchmark reports generated events per second; the field
kernels report input events per second.
"""

import argparse
import time

import numpy as np

from evframes import _kernels


def best_time(fn, args, repeat):
    fn(*args)  # warm-up (jit compilation, cache effects)
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--events", type=int, default=10_000_000, help="field kernel input size")
    parser.add_argument("--frames", type=int, default=120, help="simulator scene length")
    parser.add_argument("--side", type=int, default=128, help="sensor width and height")
    parser.add_argument("--repeat", type=int, default=3, help="timed repetitions (best wins)")
    args = parser.parse_args()

    if not _kernels.NUMBA_ENABLED:
        print("numba backend unavailable (not installed or EVFRAMES_NUMBA=0); nothing to compare")
        return

    rng = np.random.default_rng(0)
    n, side = args.events, args.side
    x = rng.integers(0, side, size=n, dtype=np.int32)
    y = rng.integers(0, side, size=n, dtype=np.int32)
    t = np.arange(n, dtype=np.int64)

    log_frames = np.ascontiguousarray(
        np.cumsum(rng.normal(0.0, 0.2, size=(args.frames, side, side)), axis=0)
    )
    times = np.arange(args.frames, dtype=np.int64) * 10_000
    n_generated = len(_kernels.simulate_crossings_numpy(log_frames, times, 0.2, 0.0)[0])

    rows = [
        ("count_field", _kernels._count_field_jit, _kernels.count_field_numpy,
         (x, y, side, side), n),
        ("last_timestamp_field", _kernels._last_timestamp_jit, _kernels.last_timestamp_field_numpy,
         (x, y, t, side, side), n),
        ("simulate_crossings", _kernels._simulate_jit, _kernels.simulate_crossings_numpy,
         (log_frames, times, 0.2, 0.0), n_generated),
    ]

    print(f"{'kernel':<22} {'numba':>12} {'numpy':>12} {'speedup':>8}")
    for name, jit_fn, numpy_fn, call_args, volume in rows:
        t_jit = best_time(jit_fn, call_args, args.repeat)
        t_np = best_time(numpy_fn, call_args, args.repeat)
        print(
            f"{name:<22} {volume / t_jit / 1e6:>9.1f} M/s {volume / t_np / 1e6:>9.1f} M/s"
            f" {t_np / t_jit:>7.1f}x"
        )


if __name__ == "__main__":
    main()
