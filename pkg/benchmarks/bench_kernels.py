"""Benchmark the element kernels: compiled extension vs numpy fallback.

Times the two hot operations of the fixed-point iteration (variable
coefficient potential apply and weighted density) on a range of grid sizes
and prints per-call timings plus the speedup.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]
"""

import argparse
import time

import numpy as np

from hartreefem import _pykernels
from hartreefem.assembly import element_product_tensor

try:
    from hartreefem import _core
except ImportError:
    _core = None


def _timeit(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7,
                        help="timing repetitions per case (best of R)")
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not available; showing the fallback only")

    rng = np.random.default_rng(0)
    header = f"{'n':>5} {'op':>18} {'python [ms]':>12}"
    if _core is not None:
        header += f" {'compiled [ms]':>14} {'speedup':>8}"
    print(header)

    for n in (17, 33, 65, 129, 257):
        Q = element_product_tensor(1.0 / (n - 1))
        z = np.zeros((n, n), dtype=np.complex128)
        z[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2)) \
            + 1j * rng.standard_normal((n - 2, n - 2))
        u = np.zeros((n, n))
        u[1:-1, 1:-1] = rng.standard_normal((n - 2, n - 2))

        for label, fn_py, fn_c, call_args in (
            ("apply_potential", _pykernels.apply_nodal_potential,
             getattr(_core, "apply_nodal_potential", None), (u, z, Q)),
            ("weighted_density", _pykernels.weighted_density,
             getattr(_core, "weighted_density", None), (z, Q)),
        ):
            t_py = _timeit(fn_py, call_args, args.repeat)
            line = f"{n:>5} {label:>18} {1e3 * t_py:>12.3f}"
            if fn_c is not None:
                t_c = _timeit(fn_c, call_args, args.repeat)
                line += f" {1e3 * t_c:>14.3f} {t_py / t_c:>8.1f}"
            print(line)

        if _core is not None:
            np.testing.assert_allclose(
                _core.apply_nodal_potential(u, z, Q),
                _pykernels.apply_nodal_potential(u, z, Q), rtol=1e-12)


if __name__ == "__main__":
    main()
