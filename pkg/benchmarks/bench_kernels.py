"""Time the compiled path kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--paths M] [--steps N] [--repeat R]

Each kernel runs on the same fBm ensemble under both backends; the results
are checked for agreement before the timings are reported.
"""
import argparse
import time

import numpy as np

from maxbounds.kernels import backends
from maxbounds.processes import TimeGrid, simulate_fbm


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--steps", type=int, default=512)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    x = np.ascontiguousarray(simulate_fbm(0.5, TimeGrid.uniform(1.0, args.steps), args.paths, seed=1).values)
    coarse = np.ascontiguousarray(x[:2000, :: max(1, args.steps // 64)])
    mods = backends()
    cases = {
        "abs_max_rows": lambda m: m.abs_max_rows(x),
        "upcross_counts": lambda m: m.upcross_counts(x, -0.1, 0.1),
        "upcross_times (1000 rows)": lambda m: [m.upcross_times(row, -0.1, 0.1) for row in x[:1000]],
        "lemma3_check_rows": lambda m: m.lemma3_check_rows(x, -0.1, 0.1, 2),
        "pair_moment_means (p=4, 2000 rows)": lambda m: m.pair_moment_means(coarse, 4.0),
    }
    print(f"M={args.paths} N={args.steps} backends={sorted(mods)}")
    print(f"{'kernel':36s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, run in cases.items():
        t_py, r_py = best_of(lambda: run(mods["python"]), args.repeat)
        if "cython" not in mods:
            print(f"{name:36s} {t_py:11.4f} {'n/a':>11s} {'n/a':>8s}")
            continue
        t_cy, r_cy = best_of(lambda: run(mods["cython"]), args.repeat)
        if isinstance(r_py, list):
            assert all(np.array_equal(a, b) for a, b in zip(r_py, r_cy)), name
        elif isinstance(r_py, tuple):
            assert r_py == r_cy, name
        else:
            np.testing.assert_allclose(r_cy, r_py, rtol=1e-12, err_msg=name)
        print(f"{name:36s} {t_py:11.4f} {t_cy:11.4f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
