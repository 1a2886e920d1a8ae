import os
import subprocess
import sys

import numpy as np
import pytest

from arealaw import _kernels_numpy, kernels
from arealaw.wick import pair_partitions

numba_backend = pytest.importorskip("arealaw._kernels_numba")


def inputs(rng):
    n, m = 7, 3
    momenta = np.arange(-3, 4, dtype=np.int64)
    phases = np.exp(-2j * np.pi * rng.random(n))
    inv = rng.normal(size=(m, m))
    gm = rng.normal(size=(m, n - m))
    raw = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    root = rng.normal(size=(3, 3))
    return {
        "cosine_row": (rng.random(n), momenta, n),
        "literal_block": (0.3 - 1.2j, phases, inv, gm, inv.T, gm[::-1].copy(), 0.4, m),
        "literal_scalar": (2.0 + 0j, phases, inv, gm, rng.normal(size=(n - m, n - m)), 0.4, m),
        "pairing_sum": (0.5 * (raw + raw.conj().T), root @ root.T + np.eye(3),
                        np.array(pair_partitions(6), dtype=np.int64)),
        "quadratic_values": (rng.normal(size=(50, 3)), rng.normal(size=(3, 3)), 0.7),
    }


@pytest.mark.parametrize("name", ["cosine_row", "literal_block", "literal_scalar",
                                  "pairing_sum", "quadratic_values"])
def test_backends_agree(name, rng):
    args = inputs(rng)[name]
    expected = getattr(_kernels_numpy, name)(*args)
    result = getattr(numba_backend, name)(*args)
    np.testing.assert_allclose(result, expected, rtol=1e-12, atol=1e-12)


def test_cosine_row_handles_large_phases():
    n = 10**6
    momenta = np.array([n // 2], dtype=np.int64)
    row = numba_backend.cosine_row(np.ones(1), momenta, n)
    np.testing.assert_array_equal(row[:4] * n, [1.0, -1.0, 1.0, -1.0])


def test_default_backend_is_numba():
    assert kernels.BACKEND == "numba"


def backend_under(flag):
    env = dict(os.environ, AREALAW_DISABLE_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", "from arealaw import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


@pytest.mark.parametrize("flag,backend", [("1", "numpy"), ("TRUE", "numpy"), ("0", "numba"), ("", "numba")])
def test_environment_flag_selects_backend(flag, backend):
    assert backend_under(flag) == backend
