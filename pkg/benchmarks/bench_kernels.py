"""Time the compiled and pure-Python RK4 kernels on the same infall problem.

    python benchmarks/bench_kernels.py [--steps N] [--repeat R]
"""

import argparse
import timeit

import numpy as np

from bhclock import _rk4_py

try:
    from bhclock import _rk4 as _rk4_c
except ImportError:
    _rk4_c = None


def make_case(n_steps):
    # M = 1 natural units: r_s = 2, kappa = 1/4; start at q0 = 1e-3 r_s from rest
    q0 = 2e-3
    tau_end = 1.25 * np.sqrt(q0 / 0.25)
    step = tau_end / n_steps
    bufs = [np.empty(n_steps + 1) for _ in range(4)]
    args = (q0, 0.0, 1.0, 2.0, 1.0, 0.25, 0, step, n_steps, 1e-12)
    return args, bufs


def bench(fn, n_steps, repeat):
    args, bufs = make_case(n_steps)
    fn(*args, *bufs)
    best = min(timeit.repeat(lambda: fn(*args, *bufs), number=1, repeat=repeat))
    return best, bufs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    t_py, ref = bench(_rk4_py.rk4_radial, args.steps, args.repeat)
    print(f"steps          {args.steps}")
    print(f"python         {t_py * 1e3:10.2f} ms")
    if _rk4_c is None:
        print("cython         not built (pip install -e . --no-build-isolation)")
        return
    t_c, out = bench(_rk4_c.rk4_radial, args.steps, args.repeat)
    diff = max(float(np.max(np.abs(a - b))) for a, b in zip(ref, out))
    print(f"cython         {t_c * 1e3:10.2f} ms")
    print(f"speed-up       {t_py / t_c:10.1f}x")
    print(f"max |diff|     {diff:10.2e}")


if __name__ == "__main__":
    main()
