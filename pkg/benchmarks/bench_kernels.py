"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import random
import time
from fractions import Fraction

import numpy as np

from movelab import kernels
from movelab.domination import dominates
from movelab.measure import EXACT, FLOAT, Measure, ground, product_measure
from movelab.tolerance import downwards_fkg_check


def _random_measure(rng, n, mode):
    w = [rng.randint(1, 50) for _ in range(1 << n)]
    s = sum(w)
    if mode == EXACT:
        return Measure(ground(n), [Fraction(x, s) for x in w], EXACT)
    return Measure(ground(n), np.array(w, dtype=float) / s, FLOAT)


def cases():
    rng = random.Random(0)
    mu10 = _random_measure(rng, 10, EXACT)
    pi10 = product_measure(ground(10), Fraction(1, 5))
    mu12f = _random_measure(rng, 12, FLOAT)
    pi12f = product_measure(ground(12), 0.2, mode=FLOAT)
    fkg4 = _random_measure(rng, 4, EXACT)
    arr = np.random.default_rng(0).random(1 << 20)
    return {
        "maxflow exact n=10": lambda: dominates(pi10, mu10),
        "maxflow float n=12": lambda: dominates(pi12f, mu12f),
        "up-set enumeration n=6": lambda: kernels.upset_masks(6),
        "FKG scan n=4": lambda: downwards_fkg_check(fkg4),
        "float sweep n=20": lambda: kernels.sweep_float(arr, 20, (0.8, 0.2, 0.1, 0.9)),
    }


def bench(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases().items():
        times = {}
        for b in backends:
            with kernels.backend(b):
                times[b] = bench(fn, args.repeat)
        row = f"{name:28s}" + "".join(f"{times[b]:11.4f}s" for b in backends)
        if "cython" in times:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
