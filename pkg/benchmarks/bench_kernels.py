"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--n 3 4 5 6] [--starts 200]

Times residual, Jacobian and full Newton polish from seeded random starts,
and checks that both backends reach the same converged configurations.
"""

import argparse
import timeit

import numpy as np

from planarcc.config import MassVector
from planarcc.kernels import CONVERGED, available_backends
from planarcc.solver import random_start


def bench(backend, n, starts, repeat):
    masses = MassVector(np.linspace(0.5, 1.5, n))
    m = masses.array
    x = random_start(masses, (0, 0)).positions
    x0s = [random_start(masses, (1, k)).positions for k in range(starts)]

    def polish_all():
        return [backend.polish(x0, m) for x0 in x0s]

    row = {
        "residual_us": min(timeit.repeat(lambda: backend.residual(x, m), number=2000,
                                         repeat=repeat)) / 2000 * 1e6,
        "jacobian_us": min(timeit.repeat(lambda: backend.residual_jacobian(x, m), number=500,
                                         repeat=repeat)) / 500 * 1e6,
        "polish_ms": min(timeit.repeat(polish_all, number=1, repeat=repeat)) / starts * 1e3,
    }
    return row, polish_all()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--starts", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    names = [b for b in ("python", "cython") if b in backends]
    print(f"{'n':>2} {'backend':>8} {'residual us':>12} {'jacobian us':>12} {'polish ms':>10}")
    for n in args.n:
        results = {}
        for name in names:
            row, polished = bench(backends[name], n, args.starts, args.repeat)
            results[name] = (row, polished)
            print(f"{n:>2} {name:>8} {row['residual_us']:>12.2f} {row['jacobian_us']:>12.2f} "
                  f"{row['polish_ms']:>10.3f}")
        if len(results) == 2:
            py, cy = results["python"], results["cython"]
            speed = py[0]["polish_ms"] / cy[0]["polish_ms"]
            agree = sum(
                a[1] == b[1] and (a[1] != CONVERGED or np.abs(a[0] - b[0]).max() < 1e-9)
                for a, b in zip(py[1], cy[1]))
            print(f"   polish speedup x{speed:.1f}, outcomes agree on {agree}/{len(py[1])} starts")


if __name__ == "__main__":
    main()
