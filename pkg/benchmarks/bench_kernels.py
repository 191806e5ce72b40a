"""Time the compiled kernels against the pure Python fallback.

Run ``python3 benchmarks/bench_kernels.py``. Each workload is executed under
every available backend and the results are compared before timing.
"""
from __future__ import annotations

import argparse
import random
import timeit

from subshift import kernels
from subshift.catalog import hard_square, words_sft
from subshift.catalog import Z2
from subshift.group import make_interval_box
from subshift.patterns import count_local
from subshift.voronoi import assign_sites, free_ball


def _box_count(X, n):
    F = make_interval_box([0] * X.rank, [n - 1] * X.rank, X.group)
    return lambda: count_local(X, F)


def _voronoi(n_centers, r2, seed=0):
    rng = random.Random(seed)
    centers = sorted({(rng.randrange(-40, 40), rng.randrange(-40, 40)) for _ in range(n_centers)})
    sites = sorted({(c[0] + b[0], c[1] + b[1]) for c in centers for b in free_ball(r2, Z2)})
    return lambda: assign_sites(sites, centers, r2, Z2)


WORKLOADS = {
    "backtrack: hard square 4x4": _box_count(hard_square(), 4),
    "backtrack: hard square 5x5": _box_count(hard_square(), 5),
    "backtrack: 3-colorings of Z, length 16": _box_count(words_sft("123", ["11", "22", "33"]), 16),
    "voronoi_assign: 200 centers, R^2=25": _voronoi(200, 25),
}


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    names = sorted(kernels.BACKENDS)
    if "compiled" not in names:
        print("compiled extension unavailable; timing the Python backend only")
    before = kernels.backend_name()
    print(f"{'workload':42s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    try:
        for label, fn in WORKLOADS.items():
            times, results = {}, {}
            for name in names:
                kernels.set_backend(name)
                results[name] = fn()
                times[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            if len({repr(r) for r in results.values()}) != 1:
                raise SystemExit(f"backends disagree on {label}")
            row = f"{label:42s}" + "".join(f"{times[n] * 1e3:10.2f}ms" for n in names)
            if len(names) > 1:
                row += f"{times['python'] / times['compiled']:11.1f}x"
            print(row)
    finally:
        kernels.set_backend(before)


if __name__ == "__main__":
    main()
