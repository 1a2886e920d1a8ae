"""Gaussian averages of powers of a quadratic form.

For a density ``N(0, G) * (lam + nu^H Lam nu)`` the r-th power integrates to
a Gaussian factor times

    U(r) = sum_s binom(r, s) lam^(r-s) r^(-s) u(s),

where ``u(s)`` is the Gaussian moment of ``(nu^T Lam nu)^s`` for covariance G,
a sum over pair partitions that collapses onto traces of words in
``X = Lam G`` and ``Y = Lam^T G``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import InconsistencyError
from .quadform import QuadraticForm

_IMAG_TOL = 1e-10
_NORMALIZATION_TOL = 1e-8
_SUBSTITUTED_TOL = 1e-9


def canonical_word(word: str) -> str:
    """Representative of a trace word under cyclic shifts and transposition.

    Transposing ``Tr(W)`` reverses the word and swaps X with Y.
    """
    swapped = word[::-1].translate(str.maketrans("XY", "YX"))
    rotations = [w[i:] + w[:i] for w in (word, swapped) for i in range(len(w))]
    return min(rotations)


class TraceBasis:
    """Real traces of words in ``X = Lam G`` and ``Y = Lam^T G`` up to length four."""

    def __init__(self, big_lambda: np.ndarray, cov: np.ndarray):
        big_lambda = np.asarray(big_lambda, dtype=np.complex128)
        cov = np.asarray(cov, dtype=np.float64)
        if big_lambda.shape != cov.shape:
            raise ValueError(f"shape mismatch {big_lambda.shape} vs {cov.shape}")
        self._letters = {"X": big_lambda @ cov, "Y": big_lambda.T @ cov}
        self._cache: dict[str, float] = {}

    def __getitem__(self, word: str) -> float:
        key = canonical_word(word)
        if key not in self._cache:
            product = self._letters[key[0]]
            for letter in key[1:]:
                product = product @ self._letters[letter]
            value = complex(np.trace(product))
            if abs(value.imag) > _IMAG_TOL * (1.0 + abs(value.real)):
                raise InconsistencyError(
                    f"trace of {key} has imaginary part {value.imag:.3e}; "
                    "the quadratic form is not Hermitian"
                )
            self._cache[key] = value.real
        return self._cache[key]


def u_closed(s: int, form: QuadraticForm, gaussian_cov: np.ndarray) -> float:
    """Moment ``u(s)`` from its diagram expansion, s in 0..4."""
    if s == 0:
        return 1.0
    tr = TraceBasis(form.big_lambda, gaussian_cov)
    t1 = tr["X"]
    if s == 1:
        return t1
    if s == 2:
        return t1**2 + tr["XX"] + tr["XY"]
    if s == 3:
        return (t1**3 + 3 * t1 * tr["XY"] + 3 * t1 * tr["XX"]
                + 6 * tr["XXY"] + 2 * tr["XXX"])
    if s == 4:
        return (t1**4
                + 6 * t1**2 * tr["XX"] + 6 * t1**2 * tr["XY"]
                + 24 * t1 * tr["XXY"] + 8 * t1 * tr["XXX"]
                + 6 * tr["XX"] * tr["XY"] + 3 * tr["XY"] ** 2 + 3 * tr["XX"] ** 2
                + 24 * tr["XXXY"] + 6 * tr["XXXX"] + 12 * tr["XXYY"] + 6 * tr["XYXY"])
    raise ValueError(f"closed forms exist for s <= 4, got {s}")


@lru_cache(maxsize=None)
def pair_partitions(n_items: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All perfect matchings of ``range(n_items)``; there are ``(n-1)!!`` of them."""
    if n_items % 2:
        raise ValueError("pair partitions need an even number of items")

    def matchings(items):
        if not items:
            yield ()
            return
        first, rest = items[0], items[1:]
        for idx, partner in enumerate(rest):
            for tail in matchings(rest[:idx] + rest[idx + 1:]):
                yield ((first, partner),) + tail

    return tuple(matchings(tuple(range(n_items))))


def u_partition_oracle(s: int, form: QuadraticForm, gaussian_cov: np.ndarray) -> float:
    """``u(s)`` by enumerating every pair partition of the 2s field slots."""
    if s == 0:
        return 1.0
    if s > 5:
        raise ValueError("enumeration is limited to s <= 5")
    pairings = np.array(pair_partitions(2 * s), dtype=np.int64)
    total = kernels.pairing_sum(
        np.ascontiguousarray(form.big_lambda, dtype=np.complex128),
        np.ascontiguousarray(gaussian_cov, dtype=np.float64),
        pairings,
    )
    return float(np.real(total))


def _integer_order(r) -> int:
    if isinstance(r, (int, np.integer)) and 1 <= r <= 4:
        return int(r)
    if isinstance(r, float) and r.is_integer() and 1 <= r <= 4:
        return int(r)
    raise ValueError(f"non-Gaussian forms support integer orders 1..4, got {r!r}")


def _is_gaussian(form: QuadraticForm) -> bool:
    return form.lam == 1.0 and not np.any(form.big_lambda)


def capital_u(r, form: QuadraticForm, gaussian_cov: np.ndarray, *, cross_check: bool = True) -> float:
    """Non-Gaussian factor ``U(r)`` of ``integral of density^r``.

    Pure Gaussian forms give 1 for every real r > 0. Otherwise r must be an
    integer in 1..4, and for r >= 2 the result is re-derived from the
    lambda-substituted expressions as an internal consistency check.
    """
    if _is_gaussian(form):
        if not r > 0:
            raise ValueError(f"order must be positive, got {r!r}")
        return 1.0
    order = _integer_order(r)
    defect = form.normalization(gaussian_cov) - 1.0
    if abs(defect) > _NORMALIZATION_TOL:
        raise InconsistencyError(f"form is not normalized (off by {defect:.3e})")
    value = sum(
        math.comb(order, s) * form.lam ** (order - s) * order ** (-s)
        * u_closed(s, form, gaussian_cov)
        for s in range(order + 1)
    )
    if cross_check and order >= 2:
        substituted = capital_u_substituted(order, form, gaussian_cov)
        if abs(substituted - value) > _SUBSTITUTED_TOL * max(1.0, abs(value)):
            raise InconsistencyError(
                f"U({order}) disagrees between evaluations: {value!r} vs {substituted!r}"
            )
    return value


def capital_u_substituted(r: int, form: QuadraticForm, gaussian_cov: np.ndarray) -> float:
    """Simplified ``U(2..4)`` in which ``Tr(Lam G)`` is traded for ``1 - lam``.

    Only valid for normalized forms.
    """
    lam = form.lam
    tr = TraceBasis(form.big_lambda, gaussian_cov)
    sym2 = tr["XX"] + tr["XY"]
    if r == 2:
        return ((1 + lam) / 2) ** 2 + sym2 / 4
    if r == 3:
        base = (1 + 2 * lam) / 3
        return base**3 + base * sym2 / 3 + (2.0 / 27.0) * (3 * tr["XXY"] + tr["XXX"])
    if r == 4:
        base = (1 + 3 * lam) / 4
        return (base**4
                + (3.0 / 8.0) * base**2 * sym2
                + (1.0 / 8.0) * base * (3 * tr["XXY"] + tr["XXX"])
                + (3.0 / 256.0) * (tr["XX"] + tr["XY"]) ** 2
                + (3.0 / 128.0) * (4 * tr["XXXY"] + tr["XXXX"] + 2 * tr["XXYY"] + tr["XYXY"]))
    raise ValueError(f"simplified forms exist for r in 2..4, got {r}")
