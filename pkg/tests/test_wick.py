import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from arealaw.errors import InconsistencyError
from arealaw.quadform import DistributionKind, QuadraticForm
from arealaw.wick import (
    TraceBasis,
    canonical_word,
    capital_u,
    capital_u_substituted,
    pair_partitions,
    u_closed,
    u_partition_oracle,
)

words = st.text(alphabet="XY", min_size=1, max_size=8)
short_words = st.text(alphabet="XY", min_size=1, max_size=4)


def double_factorial(n):
    return math.prod(range(n, 0, -2))


def random_inputs(seed, dim, lam=None):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    root = rng.normal(size=(dim, dim))
    form = QuadraticForm(rng.normal() if lam is None else lam, 0.5 * (raw + raw.conj().T),
                         DistributionKind.WIGNER)
    return form, root @ root.T + dim * np.eye(dim)


def normalized_inputs(seed, dim):
    form, cov = random_inputs(seed, dim)
    lam = 1.0 - float(np.real(np.trace(form.big_lambda @ cov)))
    return QuadraticForm(lam, form.big_lambda, form.kind), cov


@given(words, st.integers(0, 7))
def test_canonical_word_ignores_rotation(word, shift):
    shift %= len(word)
    assert canonical_word(word[shift:] + word[:shift]) == canonical_word(word)


@given(words)
def test_canonical_word_identifies_transposed_trace(word):
    swapped = word[::-1].translate(str.maketrans("XY", "YX"))
    assert canonical_word(swapped) == canonical_word(word)


@given(st.integers(0, 10**6), st.integers(1, 4), short_words)
def test_trace_basis_words_are_real_and_match_transposes(seed, dim, word):
    form, cov = random_inputs(seed, dim)
    basis = TraceBasis(form.big_lambda, cov)
    x, y = form.big_lambda @ cov, form.big_lambda.T @ cov
    product = np.eye(dim, dtype=complex)
    for letter in word:
        product = product @ (x if letter == "X" else y)
    assert basis[word] == pytest.approx(np.trace(product).real, rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_pair_partition_count(n):
    matchings = pair_partitions(n)
    assert len(matchings) == double_factorial(n - 1)
    assert len(set(matchings)) == len(matchings)
    for matching in matchings:
        assert sorted(i for pair in matching for i in pair) == list(range(n))


def test_pair_partitions_need_even_count():
    with pytest.raises(ValueError):
        pair_partitions(3)


@pytest.mark.parametrize("s", range(0, 6))
def test_one_dimensional_moments(s):
    # E[(a x^2)^s] = a^s g^s (2s-1)!! for x ~ N(0, g)
    a, g = 0.7, 1.3
    form = QuadraticForm(0.0, np.array([[a]]), DistributionKind.FIELD)
    expected = a**s * g**s * double_factorial(2 * s - 1)
    assert u_partition_oracle(s, form, np.array([[g]])) == pytest.approx(expected, rel=1e-13)
    if s <= 4:
        assert u_closed(s, form, np.array([[g]])) == pytest.approx(expected, rel=1e-13)


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(0, 4))
def test_closed_moments_match_pair_partitions(seed, dim, s):
    form, cov = random_inputs(seed, dim)
    assert u_closed(s, form, cov) == pytest.approx(u_partition_oracle(s, form, cov), rel=1e-10)


def test_monte_carlo_agrees_with_closed_moment(rng):
    form, cov = random_inputs(3, 2)
    samples = rng.multivariate_normal(np.zeros(2), cov, size=400_000)
    values = form.lam + np.einsum("ni,ij,nj->n", samples, form.big_lambda.real, samples)
    estimate = np.mean(values**3)
    error = 5 * np.std(values**3) / math.sqrt(len(values))
    assert abs(estimate - u_closed(3, form, cov)) < error


def test_closed_moment_ignores_antisymmetric_imaginary_part():
    form, cov = random_inputs(5, 3)
    real_only = QuadraticForm(form.lam, form.big_lambda.real, form.kind)
    for s in range(5):
        assert u_closed(s, form, cov) == pytest.approx(u_closed(s, real_only, cov), rel=1e-12)


def test_gaussian_form_has_unit_u_for_any_order():
    form = QuadraticForm.gaussian(3, DistributionKind.WIGNER)
    for r in (0.5, 1.5, 2, 7.25):
        assert capital_u(r, form, np.eye(3)) == 1.0


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(2, 4))
def test_binomial_sum_matches_substituted_form(seed, dim, r):
    form, cov = normalized_inputs(seed, dim)
    assert capital_u(r, form, cov, cross_check=False) == pytest.approx(
        capital_u_substituted(r, form, cov), rel=1e-9, abs=1e-12)


def test_capital_u_rejects_unnormalized_and_fractional_orders():
    form, cov = random_inputs(9, 2, lam=5.0)
    with pytest.raises(InconsistencyError):
        capital_u(2, form, cov)
    normalized, cov = normalized_inputs(9, 2)
    for bad in (1.5, 5, 0):
        with pytest.raises(ValueError):
            capital_u(bad, normalized, cov)


def test_u_of_one_is_the_normalization():
    form, cov = normalized_inputs(11, 3)
    assert capital_u(1, form, cov) == pytest.approx(1.0, abs=1e-12)

