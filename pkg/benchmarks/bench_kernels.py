"""Compiled vs pure-Python profile kernels.

    python benchmarks/bench_kernels.py [--n 200] [--repeat 3]

Times the three hot paths (F quadrature, G inversion, full profile
tabulation) for every available backend and checks that the backends agree.
"""
import argparse
import math
import time

import numpy as np

from adsksurf.kernels import backends


def best_of(fn, repeat):
    out = None
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(mod, n, theta):
    t = -0.25 * math.pi * (1 + np.cos(math.pi * (np.arange(n) + 0.5) / n))
    t = np.sort(t)
    r = np.logspace(-3, 3, n)
    return {
        "f_integral": lambda: np.array([mod.f_integral(v, theta) for v in r]),
        "g_inverse": lambda: np.array([mod.g_inverse(v, theta) for v in t]),
        "profile_arrays": lambda: np.concatenate(mod.profile_arrays(t, theta)),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--theta", type=float, default=0.5 * math.pi)
    args = p.parse_args(argv)
    mods = backends()
    timings = {}
    results = {}
    for name, mod in mods.items():
        for case, fn in cases(mod, args.n, args.theta).items():
            dt, val = best_of(fn, args.repeat)
            timings[(name, case)] = dt
            results[(name, case)] = val
    print(f"n = {args.n}, theta = {args.theta:.6f}, best of {args.repeat}")
    print(f"{'kernel':16s}" + "".join(f"{m:>14s}" for m in mods) + "     speed-up   max |diff|")
    for case in ("f_integral", "g_inverse", "profile_arrays"):
        row = f"{case:16s}" + "".join(f"{timings[(m, case)]:13.4f}s" for m in mods)
        if "cython" in mods:
            sp = timings[("python", case)] / timings[("cython", case)]
            diff = np.max(np.abs(results[("python", case)] - results[("cython", case)]))
            row += f"{sp:12.1f}x {diff:12.2e}"
        print(row)
    if "cython" not in mods:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
