from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pwperiod.errors import NonzeroConstantInner, NotInvertible
from pwperiod.series import (
    TruncatedSeries,
    binomial_series,
    series_compose,
    series_mul,
    series_powhalf_reciprocal,
    series_reciprocal,
    series_reversion,
    series_sqrt1p,
)


def S(coeffs, order=None):
    return TruncatedSeries.from_coeffs(coeffs, order)


fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def test_mul_examples():
    assert series_mul(S([1, 1], 2), S([1, -1], 2)) == S([1, 0, -1], 2)
    s = S([3, Fraction(1, 2), -7], 2)
    assert series_mul(S([1], 2), s) == s
    assert series_mul(S([1, 1, 1], 2), S([1, 1], 2)) == S([1, 2, 2], 2)


def test_mul_matches_naive_convolution():
    a = S([1, 2, 3, 4], 3)
    b = S([Fraction(1, 3), -1, 0, 5], 3)
    naive = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(4)]
    assert list((a * b).coeffs) == naive


def test_compose_examples():
    assert series_compose(S([1, 1], 3), S([0, 2], 3)) == S([1, 2], 3)
    f = S([2, -1, Fraction(3, 4), 9], 3)
    assert series_compose(f, TruncatedSeries.identity(3)) == f
    out = series_compose(S([0, 1, 1], 4), S([0, 1, -1, 2, -5], 4))
    assert out == S([0, 1], 4)


def test_compose_rejects_constant_inner():
    with pytest.raises(NonzeroConstantInner):
        series_compose(S([0, 1], 3), S([1, 1], 3))


def test_reversion_examples():
    assert series_reversion(TruncatedSeries.identity(6)) == TruncatedSeries.identity(6)
    assert series_reversion(S([0, 1, 1], 4)) == S([0, 1, -1, 2, -5], 4)
    assert series_reversion(S([0, 1, 0, 1], 5)) == S([0, 1, 0, -1, 0, 3], 5)


def test_reversion_catalan():
    # reversion of t + t^2 has coefficients (-1)^(n-1) C_(n-1)
    from math import comb

    r = series_reversion(S([0, 1, 1], 10))
    for n in range(1, 11):
        catalan = comb(2 * (n - 1), n - 1) // n
        assert r[n] == (-1) ** (n - 1) * catalan


@pytest.mark.parametrize("coeffs", [[1, 1], [0, 0, 1], [0]])
def test_reversion_rejects_noninvertible(coeffs):
    with pytest.raises(NotInvertible):
        series_reversion(S(coeffs, 4))


@settings(max_examples=200, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=7), st.integers(min_value=1, max_value=8))
def test_reversion_identity_property(tail, order):
    a1 = tail[0] if tail[0] != 0 else Fraction(1)
    f = S([0, a1] + tail[1:], order)
    g = series_reversion(f)
    ident = TruncatedSeries.identity(order)
    assert series_compose(f, g) == ident
    assert series_compose(g, f) == ident


def _gen_binom(alpha: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out *= (alpha - j) / (j + 1)
    return out


def test_binomial_series_against_generalized_coefficients():
    for alpha in (Fraction(-1, 2), Fraction(1, 2), Fraction(3, 2), Fraction(-3)):
        s = binomial_series(alpha, 8)
        assert list(s.coeffs) == [_gen_binom(alpha, k) for k in range(9)]


def test_powhalf_reciprocal_examples():
    assert series_powhalf_reciprocal(TruncatedSeries.zero(5)) == TruncatedSeries.one(5)
    r = series_powhalf_reciprocal(TruncatedSeries.identity(3))
    assert r == S([1, Fraction(-1, 2), Fraction(3, 8), Fraction(-5, 16)], 3)


@settings(max_examples=50, deadline=None)
@given(st.lists(fractions, min_size=1, max_size=6))
def test_powhalf_reciprocal_identity(tail):
    u = S([0] + tail, 6)
    r = series_powhalf_reciprocal(u)
    assert r * r * (u + 1) == TruncatedSeries.one(6)
    s = series_sqrt1p(u)
    assert s * s == u + 1


def test_reciprocal_and_division():
    a = S([2, 1, 0, 3], 3)
    assert series_mul(a, series_reciprocal(a)) == TruncatedSeries.one(3)
    assert (a / a) == TruncatedSeries.one(3)


def test_truncation_takes_min_order():
    assert (S([1, 1], 5) * S([1, 1], 2)).order == 2


def test_calculus_and_evaluation():
    s = S([1, 2, 3], 2)
    assert s.derivative() == S([2, 6], 1)
    assert s.integral() == S([0, 1, 1, 1], 3)
    assert s(Fraction(1, 2)) == Fraction(11, 4)


def test_json_roundtrip():
    s = S([Fraction(1, 3), -2, 0, Fraction(5, 7)], 3).with_var("h")
    data = s.to_json()
    assert data["coeffs"] == ["1/3", "-2", "0", "5/7"]
    assert TruncatedSeries.from_json(data) == s
