"""Benchmark the compiled distance kernels against the numpy fallback.

Runs ``directed_hausdorff`` and ``min_distances`` on random nets of
increasing size, in both the wrapped (flat torus) and unwrapped
(embedded sphere) metrics, and reports wall time plus speedup.

Usage::

    python3 benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--repeat 5]

The two backends are imported side by side, so this works regardless
of the ``HYPERIFS_PURE`` environment variable.
"""

import argparse
import time

import numpy as np

from hyperifs._core import _fallback

try:
    from hyperifs._core import _kernels
except ImportError:
    _kernels = None


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[500, 2000, 8000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return 1

    rng = np.random.default_rng(args.seed)
    header = (f"{'kernel':<20}{'n':>7}{'wrap':>6}{'cython (s)':>13}"
              f"{'python (s)':>13}{'speedup':>9}")
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        for wrap, dim in ((True, 2), (False, 3)):
            a = rng.random((n, dim))
            b = rng.random((n, dim))
            for name in ("directed_hausdorff", "min_distances"):
                fast = getattr(_kernels, name)
                slow = getattr(_fallback, name)
                ref = slow(a, b, wrap)
                got = fast(a, b, wrap)
                assert np.allclose(got, ref, atol=1e-12), name
                tc = _time(fast, (a, b, wrap), args.repeat)
                tp = _time(slow, (a, b, wrap), args.repeat)
                print(f"{name:<20}{n:>7}{str(wrap):>6}{tc:>13.5f}"
                      f"{tp:>13.5f}{tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
