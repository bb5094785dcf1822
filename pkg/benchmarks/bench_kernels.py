"""Numba vs pure-numpy kernels, plus one end-to-end integral under each backend.

Usage: python3 benchmarks/bench_kernels.py [--sizes 1000 100000 1000000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from rieszint import _kernels as k

END_TO_END = (
    "import time, numpy as np; from rieszint import _kernels; "
    "from rieszint.integrators import net_riemann_integral; "
    "from rieszint.measures import LengthMeasure; "
    "_kernels.column_fsum(np.zeros((2, 1))); _kernels.fsum(np.zeros(2)); t = time.perf_counter(); "
    "r = net_riemann_integral('x', LengthMeasure()); "
    "print(r.value[0], r.verdict.value, time.perf_counter() - t)"
)


def best_of(fn, arg, repeat):
    fn(arg)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(arg)
        times.append(time.perf_counter() - t)
    return min(times)


def kernels(sizes, repeat):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'n':>10}{'numpy [ms]':>14}{'numba [ms]':>14}{'speedup':>10}  same")
    for n in sizes:
        x = rng.standard_normal(n) * 10.0 ** rng.integers(-8, 8, n)
        cols = np.stack([x, x[::-1], -x], axis=1)
        cases = (
            ("fsum", k.fsum_numpy, k.fsum_numba, x),
            ("column_fsum", k.column_fsum_numpy, k.column_fsum_numba, cols),
            ("suffix_extrema", k.suffix_extrema_numpy, k.suffix_extrema_numba, cols),
        )
        for name, f_np, f_nb, arg in cases:
            t_np = best_of(f_np, arg, repeat)
            t_nb = best_of(f_nb, arg, repeat)
            same = np.array_equal(np.asarray(f_np(arg)), np.asarray(f_nb(arg)))
            print(f"{name:<16}{n:>10}{t_np * 1e3:>14.3f}{t_nb * 1e3:>14.3f}{t_np / t_nb:>10.1f}  {same}")


def end_to_end():
    print("\nnet Riemann of x on [0, 1], dyadic chain to 2**20 cells (kernels warmed up):")
    for flag in ("0", "1"):
        env = dict(os.environ, RIESZINT_PURE_NUMPY=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        value, verdict, secs = out.stdout.split()
        label = "numpy" if flag == "1" else "numba"
        print(f"  {label:<6} value={value} verdict={verdict} time={float(secs):.2f} s")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000, 1_000_000])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--skip-end-to-end", action="store_true")
    args = p.parse_args(argv)
    if not k.NUMBA_AVAILABLE:
        sys.exit("numba is not importable; nothing to compare")
    kernels(args.sizes, args.repeat)
    if not args.skip_end_to_end:
        end_to_end()


if __name__ == "__main__":
    main()
