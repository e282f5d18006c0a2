import math
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rauzy.core import nu, word_matrix
from rauzy.enumeration import (
    CONSTANT,
    EXACT,
    BudgetExceededError,
    DeltaMode,
    classify,
    partition_table,
    prefixed_sum,
    remainder_closed_form,
    remainder_summands,
    remainder_term,
    x_partition_sum,
    x_series,
    x_sum,
)


def brute_force(d, n, keep=lambda w: True, prefix=()):
    """Independent oracle: enumerate words and multiply matrices from scratch."""
    return sum(
        (nu(word_matrix(d, prefix + w)) for w in product(range(1, d + 1), repeat=n) if keep(w)),
        F(0),
    )


def in_class(k):
    def keep(w):
        return len(set(w[:k])) == 1 and w[k] != w[0]

    return keep


def test_classify_examples():
    assert classify((1, 1, 2)) == 2
    assert classify((3, 3, 3)) == CONSTANT
    assert classify((2, 1, 1)) == 1
    with pytest.raises(ValueError):
        classify(())


def test_x_sum_examples():
    assert x_sum(3, 0) == 1
    assert x_sum(3, 1) == F(3, 4)
    assert x_sum(3, 2) == F(7, 12)


@pytest.mark.parametrize("d,n", [(3, 3), (3, 5), (4, 3), (5, 2)])
def test_x_sum_matches_brute_force(d, n):
    assert x_sum(d, n) == brute_force(d, n)


def test_partition_examples():
    assert x_partition_sum(3, 2, 1) == F(1, 4)
    assert x_partition_sum(3, 3, 2) == F(1, 12)
    with pytest.raises(ValueError):
        x_partition_sum(3, 3, 3)


@pytest.mark.parametrize("d,n", [(3, 4), (4, 3)])
def test_partition_sums_match_brute_force(d, n):
    for k in range(1, n):
        assert x_partition_sum(d, n, k) == brute_force(d, n, in_class(k))


def test_partition_completeness():
    table = partition_table(3, 9)
    for n in range(1, 10):
        constant = sum((nu(word_matrix(3, (j,) * n)) for j in (1, 2, 3)), F(0))
        assert table.constant_part(n) == constant
        assert sum((table.xk(n, k) for k in range(1, n)), F(0)) + constant == table.x(n)


def test_word_counts():
    table = partition_table(3, 6)
    for n in range(7):
        assert table.word_count(n) == 3**n
    assert table.word_count(4, 1) == 3 * 2 * 9


def test_remainder_examples():
    assert remainder_term(3, 1) == F(1, 4)
    assert remainder_closed_form(3, 2) == F(1, 60) == nu(word_matrix(3, (1, 2, 2)))
    assert remainder_closed_form(4, 1) == F(1, 96) == nu(word_matrix(4, (1, 2)))


def test_remainder_summands_all_equal():
    for d in (3, 4, 5, 6):
        for n in (1, 2, 7, 50):
            terms = remainder_summands(d, n)
            assert len(terms) == d * (d - 1)
            assert {v for _, _, v in terms} == {remainder_closed_form(d, n)}


def test_remainder_float_mode():
    assert remainder_term(3, 2, 0.9) == pytest.approx(6 * (1 / 60) ** 0.9, rel=1e-12)


def test_series_rows():
    rows = x_series(3, 2)
    assert [(r.n, r.k, r.value) for r in rows] == [(0, None, 1), (1, None, F(3, 4)), (2, None, F(7, 12)), (2, 1, F(1, 4))]


def test_series_float_single_step():
    rows = x_series(3, 1, 0.9)
    assert rows[1].value == pytest.approx(3 * 0.25**0.9, rel=1e-12)


def test_float_mode_agrees_with_exact_at_unit_delta():
    assert x_sum(3, 6, DeltaMode(1.0)) == pytest.approx(float(x_sum(3, 6)), rel=1e-14)


def test_x_sum_decreases_at_unit_delta():
    table = partition_table(3, 8)
    xs = [table.x(n) for n in range(9)]
    assert all(b < a for a, b in zip(xs, xs[1:]))


def test_lemma52_surrogate_small():
    assert x_partition_sum(3, 2, 1) >= nu(word_matrix(3, (1, 2)))
    for n in (1, 2, 3):
        rhs = prefixed_sum(3, (1, 2), n)
        assert rhs == brute_force(3, n, prefix=(1, 2))
        assert x_partition_sum(3, n + 2, 1) >= rhs


def test_budget_refuses_instead_of_truncating():
    with pytest.raises(BudgetExceededError):
        x_sum(3, 6, budget=3**5)
    assert x_sum(3, 5, budget=3**5) == brute_force(3, 5)


@pytest.mark.parametrize("workers", [1, 3])
def test_results_independent_of_workers(workers):
    assert x_sum(3, 7, workers=workers) == x_sum(3, 7, workers=1)
    assert x_sum(3, 7, 0.8, workers=workers) == x_sum(3, 7, 0.8, workers=1)


def test_delta_mode_validation():
    with pytest.raises(ValueError):
        DeltaMode(0.0)
    with pytest.raises(ValueError):
        DeltaMode(1.5)
    with pytest.raises(ValueError):
        DeltaMode(0.5, exact=True)
    assert EXACT.power(F(1, 2), 3) == F(1, 8)


@given(st.floats(0.3, 1.0))
def test_float_sum_matches_oracle(delta):
    expected = math.fsum(float(nu(word_matrix(3, w))) ** delta for w in product((1, 2, 3), repeat=3))
    got = x_sum(3, 3, delta)
    assert got == x_sum(3, 3, delta)
    assert got == pytest.approx(expected, rel=1e-10)
