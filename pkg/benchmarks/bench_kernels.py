"""Time the numba and numpy kernel paths against each other.

Usage::

    python3 benchmarks/bench_kernels.py [--dims 2 4 8 16] [--repeat 200]

Both paths are imported directly, so the ``QPWORK_BACKEND`` flag does not
matter here.  The first numba call (compilation) is excluded.
"""

import argparse
import timeit

import numpy as np

from qpwork import _kernels
from qpwork.events import random_density_matrix, random_hermitian
from qpwork.linalg import hermitian_eig


def _inputs(dim, seed=0):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, dim)
    pi = hermitian_eig(h).projectors
    pi_prime = hermitian_eig(random_hermitian(rng, dim)).projectors
    return h, random_density_matrix(rng, dim), pi, pi_prime


def _time(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[2, 4, 8, 16])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; only the numpy path can be timed")

    print(f"{'kernel':<22}{'dim':>5}{'numba [us]':>14}{'numpy [us]':>14}{'speedup':>10}")
    for dim in args.dims:
        h, rho, pi, pi_prime = _inputs(dim)
        cases = {
            "jacobi_eigh": (
                lambda: _kernels.jacobi_eigh_numba(h),
                lambda: _kernels.jacobi_eigh_numpy(h),
            ),
            "triple_trace_weights": (
                lambda: _kernels.triple_trace_weights_numba(pi, rho, pi, pi_prime),
                lambda: _kernels.triple_trace_weights_numpy(pi, rho, pi, pi_prime),
            ),
        }
        for name, (fast, slow) in cases.items():
            t_fast = _time(fast, args.repeat) if _kernels.HAVE_NUMBA else float("nan")
            t_slow = _time(slow, args.repeat)
            print(f"{name:<22}{dim:>5}{t_fast * 1e6:>14.1f}{t_slow * 1e6:>14.1f}{t_slow / t_fast:>10.1f}")


if __name__ == "__main__":
    main()
