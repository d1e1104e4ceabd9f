"""Exact formal calculus in one variable.

Generalized binomial coefficients, Laurent polynomials with rational
coefficients, the truncated expansions of ``(x+1)**(-k+n-l-1)`` that
define the diamond product, and residue extraction.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

Scalar = Fraction
Number = Union[int, Fraction]


def to_scalar(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to an exact rational."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"decimal scalars are not accepted: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_scalar(value: Fraction) -> str:
    """Render a rational as ``"p/q"`` (denominator always present)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


@lru_cache(maxsize=None)
def gen_binomial(a: int, m: int) -> Fraction:
    """``a(a-1)...(a-m+1)/m!`` for any integer ``a`` and ``m >= 0``."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    num = 1
    den = 1
    for i in range(m):
        num *= a - i
        den *= i + 1
    return Fraction(num, den)


def binomial_series(a: int, order: int) -> list[Fraction]:
    """Coefficients of ``(1+x)**a`` up to and including ``x**order``."""
    return [gen_binomial(a, i) for i in range(order + 1)]


class LaurentPoly:
    """Finite Laurent polynomial in ``x`` with exact rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, Number] | Iterable[tuple[int, Number]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[int, Fraction] = {}
        for exp, coeff in items:
            if not isinstance(exp, int):
                raise TypeError("exponents must be integers")
            c = clean.get(exp, Fraction(0)) + to_scalar(coeff)
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self._terms = clean

    @classmethod
    def monomial(cls, exp: int, coeff: Number = 1) -> "LaurentPoly":
        return cls({exp: coeff})

    @classmethod
    def one_plus_x(cls, power: int) -> "LaurentPoly":
        """``(1+x)**power`` for ``power >= 0``."""
        if power < 0:
            raise ValueError("use binomial_series for negative powers")
        return cls({i: gen_binomial(power, i) for i in range(power + 1)})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coeff(self, exp: int) -> Fraction:
        return self._terms.get(exp, Fraction(0))

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def min_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return min(self._terms)

    def max_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has no exponents")
        return max(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self._terms.items()))

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            out: dict[int, Fraction] = {}
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
            return LaurentPoly(out)
        s = to_scalar(other)
        return LaurentPoly({e: c * s for e, c in self._terms.items()})

    __rmul__ = __mul__

    def derivative(self) -> "LaurentPoly":
        return LaurentPoly({e - 1: c * e for e, c in self._terms.items() if e})

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly({0: other})
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "LaurentPoly(0)"
        parts = [f"{c}*x^{e}" for e, c in sorted(self._terms.items(), reverse=True)]
        return "LaurentPoly(" + " + ".join(parts) + ")"


def residue_coeff(p: LaurentPoly) -> Fraction:
    """Coefficient of ``x**-1``."""
    return p.coeff(-1)


def truncation_poly(k: int, n: int, l: int) -> LaurentPoly:
    """Taylor polynomial in ``1/x`` of ``(x+1)**(-k+n-l-1)`` keeping ``n+1`` terms.

    The lowest exponent that survives is ``-(k+l+1)``.
    """
    if min(k, n, l) < 0:
        raise ValueError("indices must be nonnegative")
    a = -k + n - l - 1
    return LaurentPoly({a - m: gen_binomial(a, m) for m in range(n + 1)})


def remainder_coeffs(k: int, n: int, l: int, extra: int) -> LaurentPoly:
    """The next ``extra`` terms of the expansion that ``truncation_poly`` drops."""
    a = -k + n - l - 1
    return LaurentPoly({a - m: gen_binomial(a, m) for m in range(n + 1, n + 1 + extra)})


def binom_sum_identity_check(k: int, n: int, l: int, p: int) -> bool:
    """Exact check of the collapse identity used to split the diamond action.

    ``sum_m C(a, m) C(a-m, p-m) (-1)**(p-m) == C(a, p) * [p == 0]`` with
    ``a = -k+n-l-1``.
    """
    if not 0 <= p <= n:
        raise ValueError("need 0 <= p <= n")
    a = -k + n - l - 1
    total = sum(
        (gen_binomial(a, m) * gen_binomial(a - m, p - m) * (-1) ** (p - m) for m in range(p + 1)),
        Fraction(0),
    )
    return total == (gen_binomial(a, p) if p == 0 else 0)
