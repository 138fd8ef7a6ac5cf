"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel: best wall time for each implementation and the
speed-up. Without the compiled extension only the Python column is filled.
"""

import argparse
import timeit

import numpy as np

from halo import _kernels_py as pure

try:
    from halo import _kernels as compiled
except ImportError:
    compiled = None


def cases():
    rng = np.random.default_rng(0)
    phis = rng.uniform(0.0, 2 * np.pi, 200_000)
    ds = rng.uniform(0.0, 0.1, 100_000)
    eps = rng.uniform(0.0, 1e-9, 100_000)
    betas = rng.uniform(0.0, 1e-6, 100_000)
    return {
        "crossing_rates(2e5 rays)": lambda m: m.crossing_rates(phis, 2**0.5, 1.0, 1e3),
        "rational_blocks(q=1e6)": lambda m: m.rational_blocks(1_414_214, 1_000_000, 1, 1_000_000),
        "roof_chain(1e5 steps)": lambda m: m.roof_chain(1.0, ds, eps, betas),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'python s':>10s} {'compiled s':>11s} {'speed-up':>9s}")
    for name, fn in cases().items():
        tp = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:28s} {tp:10.4f} {'-':>11s} {'-':>9s}")
            continue
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:28s} {tp:10.4f} {tc:11.5f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
