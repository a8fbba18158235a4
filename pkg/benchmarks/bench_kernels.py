"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from l1fixed import kernels
from l1fixed.lp import build_chebyshev_lp
from l1fixed.spaces import SpaceSpec


def _best(fn, repeat):
    fn()  # compile / warm caches
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(mod, rng):
    m3 = rng.normal(size=(200, 3, 3)) + 1j * rng.normal(size=(200, 3, 3))
    space = SpaceSpec.direct_sum(SpaceSpec.weighted_l1([1.0, 2.0, 0.5]), SpaceSpec.trace_class(3))
    kinds, offs, sizes, w = space.layout
    pts = rng.normal(size=(8, space.dim))
    many = rng.normal(size=(5000, space.dim))
    noise = np.zeros((2, space.dim))

    lp = build_chebyshev_lp(SpaceSpec.weighted_l1(rng.uniform(0.5, 2, size=6)), rng.normal(size=(8, 6)))
    rows, cols = lp.A.shape
    tab = np.zeros((rows + 1, cols + rows + 1))
    tab[:rows, :cols] = lp.A
    tab[:rows, cols:cols + rows] = np.eye(rows)
    tab[:rows, -1] = np.abs(lp.b)
    tab[rows, :cols] = -rng.uniform(size=cols)

    def simplex():
        mod.simplex_pivots(tab.copy(), np.arange(cols, cols + rows), cols + rows, 1e-9, 10**6)

    return {
        "svd 200 x (3x3)": lambda: [mod.svd_jacobi(m) for m in m3],
        "batch_norms 5000 pts": lambda: mod.batch_norms(kinds, offs, sizes, w, many),
        "subgradient 5000 iters": lambda: mod.subgradient_minimax(kinds, offs, sizes, w, pts,
                                                                  pts.mean(axis=0), 5000, 1.0, noise),
        "simplex pivots": simplex,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    mods = kernels.backends()
    results = {}
    for name, mod in mods.items():
        for label, fn in cases(mod, np.random.default_rng(0)).items():
            results.setdefault(label, {})[name] = _best(fn, args.repeat)
    print(f"{'kernel':<26}" + "".join(f"{n:>12}" for n in mods) + f"{'speedup':>10}")
    for label, row in results.items():
        line = f"{label:<26}" + "".join(f"{row[n] * 1e3:>10.2f}ms" for n in mods)
        if "numba" in row:
            line += f"{row['numpy'] / row['numba']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
