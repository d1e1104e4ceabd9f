from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from higherzhu.formal import (
    LaurentPoly,
    binom_sum_identity_check,
    binomial_series,
    format_scalar,
    gen_binomial,
    remainder_coeffs,
    residue_coeff,
    to_scalar,
    truncation_poly,
)

small = st.integers(-12, 12)
index = st.integers(0, 6)
polys = st.dictionaries(st.integers(-6, 6), st.fractions(max_denominator=7), max_size=5).map(LaurentPoly)


@pytest.mark.parametrize("a,m,expected", [(5, 0, 1), (-1, 2, 1), (-3, 2, 6), (4, 5, 0), (-1, 3, -1)])
def test_gen_binomial_values(a, m, expected):
    assert gen_binomial(a, m) == expected


def test_gen_binomial_rejects_negative_order():
    with pytest.raises(ValueError):
        gen_binomial(3, -1)


@given(small, st.integers(1, 8))
def test_pascal_rule(a, m):
    assert gen_binomial(a, m) == gen_binomial(a - 1, m) + gen_binomial(a - 1, m - 1)


@given(small, small, st.integers(0, 8))
def test_vandermonde(a, b, m):
    lhs = sum((gen_binomial(a, i) * gen_binomial(b, m - i) for i in range(m + 1)), Fraction(0))
    assert lhs == gen_binomial(a + b, m)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_series_multiply(a, b):
    order = 6
    pa = LaurentPoly(dict(enumerate(binomial_series(a, order))))
    pb = LaurentPoly(dict(enumerate(binomial_series(b, order))))
    prod = pa * pb
    for i, c in enumerate(binomial_series(a + b, order)):
        assert prod.coeff(i) == c


def test_truncation_poly_values():
    x = LaurentPoly.monomial
    assert truncation_poly(0, 0, 0) == x(-1)
    assert truncation_poly(0, 1, 1) == x(-1) - x(-2)
    assert truncation_poly(0, 0, 1) == x(-2)


@given(index, index, index)
def test_truncation_poly_shape(k, n, l):
    p = truncation_poly(k, n, l)
    a = -k + n - l - 1
    assert all(-(k + l + 1) <= e <= a for e in p.exponents())
    if a < 0:
        # no binomial C(a, m) vanishes for negative a
        assert p.exponents() == list(range(-(k + l + 1), a + 1))


def test_remainder_continues_expansion():
    full = LaurentPoly({-2 - m: gen_binomial(-2, m) for m in range(5)})
    assert truncation_poly(1, 1, 1) + remainder_coeffs(1, 1, 1, 3) == full


def test_residue():
    x = LaurentPoly.monomial
    assert residue_coeff(x(-1)) == 1
    assert residue_coeff(x(-2, 3) + x(0, 5)) == 0
    assert residue_coeff(x(-1, 2) - x(-2)) == 2


@pytest.mark.parametrize("k,n,l,p", [(0, 1, 1, 1), (2, 3, 5, 2), (3, 0, 2, 0), (6, 6, 6, 6)])
def test_binomial_collapse_examples(k, n, l, p):
    assert binom_sum_identity_check(k, n, l, p)


def test_binomial_collapse_exhaustive():
    for k in range(7):
        for n in range(7):
            for l in range(7):
                for p in range(n + 1):
                    assert binom_sum_identity_check(k, n, l, p)


def test_binomial_collapse_index_range():
    with pytest.raises(ValueError):
        binom_sum_identity_check(0, 1, 0, 2)


@given(polys, polys, polys)
def test_laurent_ring_laws(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert (p * q) * r == p * (q * r)
    assert p - p == LaurentPoly()


@given(polys, polys)
def test_derivative_leibniz(p, q):
    assert (p * q).derivative() == p.derivative() * q + p * q.derivative()


@given(polys)
def test_residue_of_derivative_vanishes(p):
    assert residue_coeff(p.derivative()) == 0


@given(st.fractions())
def test_scalar_text_roundtrip(x):
    assert to_scalar(format_scalar(x)) == x


@pytest.mark.parametrize("bad", ["0.5", "1e3", 0.5])
def test_decimals_rejected(bad):
    with pytest.raises((ValueError, TypeError)):
        to_scalar(bad)
