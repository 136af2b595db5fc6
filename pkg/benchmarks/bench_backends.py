#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Run after an in-place build (pip install -e . builds the extension):

    python benchmarks/bench_backends.py
"""

import math
import time

import numpy as np

from hmftrace.backends import _ref

try:
    from hmftrace.backends import _hot
except ImportError:
    _hot = None


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, args_fn):
    args = args_fn()
    t_ref = timeit(getattr(_ref, name), *args)
    row = f"{name:22s} numpy {t_ref * 1e3:9.2f} ms"
    if _hot is not None:
        t_hot = timeit(getattr(_hot, name), *args)
        row += f"   ext {t_hot * 1e3:9.2f} ms   speedup {t_ref / t_hot:6.2f}x"
        a = getattr(_ref, name)(*args)
        b = getattr(_hot, name)(*args)
        if isinstance(a, tuple):
            diff = max(float(np.max(np.abs(np.sort(x) - np.sort(y))))
                       for x, y in zip(a, b))
        else:
            diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        row += f"   max diff {diff:.1e}"
    print(row)


def main():
    rng = np.random.default_rng(0)
    print(f"compiled backend available: {_hot is not None}")

    bench("bump_profile", lambda: (rng.uniform(-1.5, 1.5, size=2_000_000),))

    lsq = rng.uniform(0.0, 40.0, size=(2000, 2))
    xw = np.exp(rng.uniform(-1.2, 1.2, size=(512, 2)))
    bench("theta_sum_batch", lambda: (xw, lsq))

    w = np.array([[1.0, math.sqrt(2.0)], [1.0, -math.sqrt(2.0)]])
    log_eps = math.log(3.0 + 2.0 * math.sqrt(2.0))
    bench("norm_char_scan", lambda: (w, -2500, 2500, -1800, 1800, log_eps, 2e5))

    absn = rng.uniform(1.0, 1e5, size=1_000_000)
    c = rng.uniform(0.0, 1.0, size=1_000_000)
    bench("power_char_sum", lambda: (absn, c, 2.5 - 1.0j, 1.0))


if __name__ == "__main__":
    main()
