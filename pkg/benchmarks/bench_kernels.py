"""Benchmark the hot kernels on both backends.

The backend is fixed at import time by FRANSONSIM_NO_NUMBA, so this
script times each backend in a fresh subprocess and prints a table.
Run directly:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --size 4000000 --repeats 7
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _workloads(size):
    import numpy as np

    from fransonsim import kernels

    t = np.arange(size, dtype=np.float64)
    x = np.sin(0.01 * t) + 0.1 * np.cos(0.37 * t)
    z = np.sin(1.7 * t + 0.2)  # deterministic stand-in for unit normals
    return {
        "triangle_wave": lambda: kernels.triangle_wave(t, 1000.0),
        "sliding_min_max": lambda: kernels.sliding_min_max(x, 455),
        "ou_path": lambda: kernels.ou_path(z, 0.9967, 0.3, 0.7),
    }


def measure(size, repeats):
    from fransonsim import kernels

    results = {"backend": kernels.backend_name(), "timings": {}}
    for name, fn in _workloads(size).items():
        fn()  # warm up (JIT compile on the numba path)
        best = min(_timed(fn) for _ in range(repeats))
        results["timings"][name] = best
    return results


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def _run_backend(no_numba, size, repeats):
    env = dict(os.environ, FRANSONSIM_NO_NUMBA="1" if no_numba else "")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--measure",
         "--size", str(size), "--repeats", str(repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=1_000_000,
                        help="array length per kernel (default 1e6)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repeats, best-of (default 5)")
    parser.add_argument("--measure", action="store_true",
                        help="time the current backend and print JSON (internal)")
    args = parser.parse_args(argv)

    if args.measure:
        json.dump(measure(args.size, args.repeats), sys.stdout)
        return 0

    fast = _run_backend(no_numba=False, size=args.size, repeats=args.repeats)
    slow = _run_backend(no_numba=True, size=args.size, repeats=args.repeats)
    if fast["backend"] == slow["backend"]:
        print("numba unavailable, timing the numpy fallback only", file=sys.stderr)

    print(f"size {args.size}, best of {args.repeats}")
    header = f"{'kernel':<18}{fast['backend']:>12}{slow['backend']:>12}{'ratio':>8}"
    print(header)
    print("-" * len(header))
    for name in fast["timings"]:
        a = fast["timings"][name]
        b = slow["timings"][name]
        print(f"{name:<18}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>8.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
