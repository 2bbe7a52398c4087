"""Time the Jacobi eigensolver backends and one end-to-end divergence call.

    python3 benchmarks/bench_kernels.py [--sizes 2,4,8,16] [--repeat 5]

The end-to-end rows run in subprocesses so that ``QFDIV_NUMBA`` takes effect
at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from qfdiv import _kernels
from qfdiv._accel import HAS_NUMBA
from qfdiv.linalg import JACOBI_MAX_SWEEPS, JACOBI_TOL

E2E = """
import timeit
from qfdiv import maximal_f_divergence, make_named, random_density, backend_name
rho, sigma = random_density({d}, seed=1), random_density({d}, seed=2)
f = make_named("xlogx")
maximal_f_divergence(rho, sigma, f)
n = {n}
t = min(timeit.repeat(lambda: maximal_f_divergence(rho, sigma, f), number=n, repeat=3)) / n
print(backend_name(), t)
"""


def hermitian(n, rng):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return np.ascontiguousarray((a + a.conj().T) / 2)


def best(fn, a, repeat, number):
    return min(timeit.repeat(lambda: fn(a.copy(), JACOBI_TOL, JACOBI_MAX_SWEEPS),
                             number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="2,4,8,16,32")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)
    loops = _kernels.jacobi_loops if HAS_NUMBA and _kernels.USE_NUMBA else None
    print(f"{'n':>4} {'numba loops':>14} {'numpy slices':>14} {'LAPACK eigh':>14} {'speedup':>9}")
    for n in sizes:
        a = hermitian(n, rng)
        number = max(1, 2000 // (n * n))
        t_np = best(_kernels.jacobi_numpy, a, args.repeat, max(1, number // 10))
        t_nb = best(loops, a, args.repeat, number) if loops else float("nan")
        t_la = min(timeit.repeat(lambda: np.linalg.eigh(a), number=number, repeat=args.repeat)) / number
        print(f"{n:>4} {t_nb * 1e6:>12.1f}us {t_np * 1e6:>12.1f}us {t_la * 1e6:>12.1f}us {t_np / t_nb:>8.1f}x")
    print("\nend to end: maximal_f_divergence(xlogx), d=6")
    for flag in ("1", "0"):
        env = dict(os.environ, QFDIV_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E.format(d=6, n=50)], env=env,
                             capture_output=True, text=True, check=True).stdout.split()
        print(f"  {out[0]:>6}: {float(out[1]) * 1e6:.1f}us per call")


if __name__ == "__main__":
    main()
