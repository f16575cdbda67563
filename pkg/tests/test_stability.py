from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vedkit.exactcore import NOT_STABILIZED
from vedkit.stability import VedTable, earliest_stable_window, fit_and_validate, ved_table


def table_of(f, lo=3, hi=14):
    return VedTable.from_values({n: f(n) for n in range(lo, hi + 1)})


def test_constant_sequence():
    rep = fit_and_validate(table_of(lambda n: 13), (5, 10), 4)
    assert rep.detectedDegree == 0 and rep.stable
    assert rep.coefficients == [13]


def test_quadratic_sequence():
    rep = fit_and_validate(table_of(lambda n: n * n + 1), (5, 10), 4)
    assert rep.detectedDegree == 2 and rep.stable
    assert rep.coefficients == [1, 0, 1]
    assert [h[0] for h in rep.holdout] == [11, 12, 13, 14]


def test_exponential_sequence_not_stabilized():
    rep = fit_and_validate(table_of(lambda n: 2**n), (5, 10), 4)
    assert rep.detectedDegree is NOT_STABILIZED and not rep.stable
    assert rep.to_dict()["detectedDegree"] == "not stabilized"


def test_holdout_mismatch_is_not_stable():
    # agrees with n^2 on the window, then departs
    rep = fit_and_validate(table_of(lambda n: n * n + (n > 12)), (5, 10), 4)
    assert rep.detectedDegree == 2 and not rep.stable
    assert [ok for *_, ok in rep.holdout] == [True, True, False, False]


def test_window_errors():
    t = table_of(lambda n: n)
    with pytest.raises(ValueError):
        fit_and_validate(t, (4, 3), 1)
    with pytest.raises(ValueError):
        fit_and_validate(t, (5, 12), 4)


def test_table_validation():
    with pytest.raises(ValueError):
        VedTable.from_values({3: 1, 5: 2})
    with pytest.raises(ValueError):
        VedTable.from_values({3: 0})
    with pytest.raises(ValueError):
        ved_table(2, 5)


def test_real_table_small_range():
    t = ved_table(3, 6)
    assert t.rows() == [(3, 13), (4, 122), (5, 1042), (6, 8683)]


def test_earliest_window():
    # eventually quadratic: a bump before n = 7
    t = table_of(lambda n: n * n + (100 if n < 7 else 0), 3, 20)
    rep = earliest_stable_window(t, 4, 3)
    assert rep is not None and rep.fitWindow == (7, 10)
    assert earliest_stable_window(table_of(lambda n: 3**n), 4, 3) is None


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=5), st.integers(3, 6))
def test_recovers_integer_polynomials(coeffs, start):
    if all(c == 0 for c in coeffs):
        coeffs[0] = 1
    f = lambda n: sum(c * n**k for k, c in enumerate(coeffs))  # noqa: E731
    shift = 1 + max(0, -min(f(n) for n in range(start, start + 14)))
    table = table_of(lambda n: f(n) + shift, start, start + 13)
    rep = fit_and_validate(table, (start, start + 9), 4)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    assert rep.stable
    assert rep.detectedDegree == len(coeffs) - 1 or rep.detectedDegree == 0
    assert [Fraction(c) for c in rep.coefficients][1:] == [Fraction(c) for c in coeffs][1:]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3))
def test_stability_persists_when_window_moves_up(deg, shift):
    table = table_of(lambda n: n**deg + 5, 3, 20)
    base = fit_and_validate(table, (5, 10), 4)
    moved = fit_and_validate(table, (5 + shift, 10 + shift), 4)
    assert base.stable and moved.stable
    assert base.coefficients == moved.coefficients
