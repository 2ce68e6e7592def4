from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from torusindex.algebra import LaurentPoly, LaurentRational
from torusindex.series import (
    RationalFunctions,
    RootSymbol,
    TruncatedSeries,
    fraction_series_inverse,
    ts_exp,
    ts_inverse,
    ts_mul,
    ts_sqrt,
)

R0 = RationalFunctions(0)
R1 = RationalFunctions(1)
X, Y = RootSymbol("x", "tangent"), RootSymbol("y", "tangent")
U = LaurentPoly.variable(1, 0)


def lr(p):
    return LaurentRational(p)


def series(ring, roots, m, mapping):
    return TruncatedSeries(ring, roots, m, {k: (v if isinstance(v, LaurentRational) else ring.scalar(v))
                                            for k, v in mapping.items()})


def test_mul_examples():
    a = series(R0, (X,), 1, {(0,): 1, (1,): 1})
    b = series(R0, (X,), 1, {(0,): 1, (1,): -1})
    assert ts_mul(a, b) == TruncatedSeries.one(R0, (X,), 1)
    a = series(R0, (X, Y), 2, {(0, 0): 1, (1, 0): 1})
    b = series(R0, (X, Y), 2, {(0, 0): 1, (0, 1): 1})
    assert a * b == series(R0, (X, Y), 2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})


def test_inverse_examples():
    one = TruncatedSeries.one(R0, (X,), 3)
    assert ts_inverse(one) == one
    a = series(R0, (X,), 2, {(0,): 1, (1,): -1})
    assert ts_inverse(a) == series(R0, (X,), 2, {(0,): 1, (1,): 1, (2,): 1})
    d = lr(U ** -1 - U)
    s = lr(U ** -1 + U)
    a = TruncatedSeries(R1, (X,), 1, {(0,): d, (1,): s * Fraction(1, 2)})
    want = TruncatedSeries(R1, (X,), 1, {(0,): d.inverse(), (1,): -(s / (d * d)) * Fraction(1, 2)})
    assert ts_inverse(a) == want


def test_exp_sqrt_examples():
    zero = TruncatedSeries.zero(R0, (X,), 2)
    assert ts_exp(zero) == TruncatedSeries.one(R0, (X,), 2)
    half = series(R0, (X,), 2, {(1,): Fraction(1, 2)})
    assert ts_exp(half) == series(R0, (X,), 2, {(0,): 1, (1,): Fraction(1, 2), (2,): Fraction(1, 8)})
    a = series(R0, (X,), 2, {(0,): 1, (1,): 1})
    assert ts_sqrt(a) == series(R0, (X,), 2, {(0,): 1, (1,): Fraction(1, 2), (2,): Fraction(-1, 8)})


def test_exp_requires_nilpotent_and_sqrt_unit():
    with pytest.raises(ValueError):
        ts_exp(series(R0, (X,), 2, {(0,): 1}))
    with pytest.raises(ValueError):
        ts_sqrt(series(R0, (X,), 2, {(0,): 4}))


def test_univariate_inverse_matches_sympy():
    x = sympy.symbols("x")
    coeffs = [Fraction(1), Fraction(1, 6), Fraction(0), Fraction(1, 120), Fraction(0), Fraction(1, 5040)]
    ours = fraction_series_inverse(coeffs, 5)
    poly = sum(sympy.Rational(c.numerator, c.denominator) * x ** j for j, c in enumerate(coeffs))
    theirs = sympy.series(1 / poly, x, 0, 6).removeO()
    assert [sympy.Rational(c.numerator, c.denominator) for c in ours] == [theirs.coeff(x, j) for j in range(6)]


# -- properties --------------------------------------------------------------------

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def nilpotent(draw, roots=(X, Y), m=3):
    terms = {}
    for i in range(m + 1):
        for j in range(m + 1 - i):
            if i + j and draw(st.booleans()):
                terms[(i, j)] = lr(LaurentPoly(1, {(draw(st.integers(-2, 2)),): draw(coeff)}))
    return TruncatedSeries(R1, roots, m, terms)


units = st.tuples(st.integers(-2, 2), coeff.filter(bool)).map(lambda t: lr(LaurentPoly.monomial([t[0]], t[1])))


@settings(max_examples=200, deadline=None)
@given(nilpotent(), units)
def test_inverse_is_two_sided(n, unit):
    a = n + TruncatedSeries.constant(R1, n.roots, n.order, unit)
    inv = ts_inverse(a)
    one = TruncatedSeries.one(R1, n.roots, n.order)
    assert a * inv == one and inv * a == one


@settings(max_examples=100, deadline=None)
@given(nilpotent(), nilpotent())
def test_exp_is_a_homomorphism(a, b):
    assert ts_exp(a + b) == ts_exp(a) * ts_exp(b)


@settings(max_examples=100, deadline=None)
@given(nilpotent())
def test_sqrt_squares_back(n):
    a = n + 1
    assert ts_sqrt(a) * ts_sqrt(a) == a


@settings(max_examples=100, deadline=None)
@given(nilpotent(m=3), units)
def test_truncation_consistency(n, unit):
    a = n + TruncatedSeries.constant(R1, n.roots, n.order, unit)
    low = a.truncate(2)
    assert ts_inverse(a).truncate(2) == ts_inverse(low)
    assert ts_exp(n).truncate(2) == ts_exp(n.truncate(2))
    assert (a * a).truncate(2) == low * low
