"""Time the fidelity grid scan on the numba and numpy kernels.

    python3 benchmarks/bench_scan.py [--repeat 5] [--step 1e-3]

Both kernels evaluate ``|sum_k c_k exp(i t lam_k)|`` on the same grid; the
script checks that they agree and prints the best time of each.
"""
import argparse
import time

import numpy as np

from pstkit import _kernels
from pstkit.graph_core import cartesian_power, make_named
from pstkit.walk_oracle import eigh

CASES = [
    ("path:4", make_named("path", 4), 0, 3),
    ("hypercube:4", make_named("hypercube", 4), 0, 15),
    ("cycle:4^3", cartesian_power(make_named("cycle", 4), 3), 0, 42),
    ("path:64", make_named("path", 64), 0, 63),
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--t-max", type=float, default=20.0)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable (or PSTKIT_DISABLE_NUMBA set); only the numpy kernel runs")
    times = args.step * np.arange(1, int(round(args.t_max / args.step)) + 1)
    print(f"{'graph':<14}{'n':>5}{'numpy s':>12}{'numba s':>12}{'speedup':>10}{'max diff':>12}")
    for name, g, u, v in CASES:
        lam, vecs = eigh(g)
        coef = np.ascontiguousarray(vecs[v] * vecs[u])
        lam = np.ascontiguousarray(lam)
        t_np, ref = best_of(lambda: _kernels.amplitude_grid_numpy(coef, lam, times), args.repeat)
        if _kernels.HAVE_NUMBA:
            _kernels.amplitude_grid_numba(coef, lam, times[:2])  # compile outside the timing
            t_nb, got = best_of(lambda: _kernels.amplitude_grid_numba(coef, lam, times), args.repeat)
            diff = float(np.max(np.abs(got - ref)))
            print(f"{name:<14}{g.n:>5}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}{diff:>12.2e}")
        else:
            print(f"{name:<14}{g.n:>5}{t_np:>12.4f}{'-':>12}{'-':>10}{'-':>12}")


if __name__ == "__main__":
    main()
