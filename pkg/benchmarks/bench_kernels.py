"""Compare the numba kernels with their numpy twins on representative inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat 20]

Both backends are imported directly, so the AREALAW_DISABLE_NUMBA flag
plays no role here. Timings are interleaved so that drift in machine load
affects both sides equally; the first numba call (compilation or cache
load) is excluded. BLAS threads are pinned to one to keep the comparison
about the kernels themselves.
"""

import os

for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import statistics
import time

import numpy as np

from arealaw import _kernels_numba, _kernels_numpy
from arealaw.wick import pair_partitions


def _cases(rng):
    n = 2000
    momenta = np.arange(-(n // 2) + 1, n // 2 + 1, dtype=np.int64)
    yield "cosine_row N=2000", (rng.random(n), momenta, n)

    n, m = 8, 4
    phases = np.exp(-2j * np.pi * rng.random(n))
    inv = rng.normal(size=(m, m))
    gm = rng.normal(size=(m, n - m))
    yield "literal_block N=8 M=4", (1.0 + 0.5j, phases, inv, gm, inv, gm, 0.3, m)
    yield "literal_scalar N=8 M=4", (1.0 + 0j, phases, inv, gm, rng.normal(size=(n - m, n - m)), 0.3, m)

    dim = 4
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    root = rng.normal(size=(dim, dim))
    pairings = np.array(list(pair_partitions(8)), dtype=np.int64)
    yield "pairing_sum s=4 dim=4", (0.5 * (raw + raw.conj().T), root @ root.T + dim * np.eye(dim), pairings)

    points = rng.normal(size=(40**3, 3))
    yield "quadratic_values 64000x3", (points, rng.normal(size=(3, 3)), 1.0)


def _time(function, args):
    start = time.perf_counter()
    function(*args)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    print(f"{'kernel':<26} {'numpy/ms':>10} {'numba/ms':>10} {'speedup':>8}")
    for name, inputs in _cases(rng):
        kernel = name.split()[0]
        slow, fast = getattr(_kernels_numpy, kernel), getattr(_kernels_numba, kernel)
        reference, result = slow(*inputs), fast(*inputs)
        if not np.allclose(reference, result, rtol=1e-10, atol=1e-12):
            raise SystemExit(f"{kernel}: backends disagree")
        numpy_times, numba_times = [], []
        for _ in range(args.repeat):
            numpy_times.append(_time(slow, inputs))
            numba_times.append(_time(fast, inputs))
        a, b = statistics.median(numpy_times), statistics.median(numba_times)
        print(f"{name:<26} {1e3 * a:>10.3f} {1e3 * b:>10.3f} {a / b:>7.1f}x")


if __name__ == "__main__":
    main()
