"""Exact Laurent polynomials and rational functions in the torus variables.

Variables ``u_1 .. u_k`` stand for ``exp(-i X_j / 2)``; a torus character with
integer weight ``n`` is the monomial ``u^(2n)``.  Coefficients are
:class:`fractions.Fraction` throughout, so nothing here ever rounds.

Full fraction reduction (a univariate GCD) is only done for ``k == 1``.  For
``k >= 2`` the denominators met in practice are products of binomials
``1 - u^v``; :func:`reduce` cancels those against a caller-supplied candidate
list and :func:`polynomialize` certifies cancellation with an exact
multivariate division, which is decisive for a single divisor.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]


class NotPolynomial(ArithmeticError):
    """A rational function that is not a Laurent polynomial.

    ``denominator`` is the surviving (reduced) denominator and ``factors`` the
    binomial factors that could be split off it, as ``(binomial, multiplicity)``
    pairs; ``cofactor`` is whatever is left after removing them.
    """

    def __init__(self, value, denominator, factors=(), cofactor=None):
        self.value = value
        self.denominator = denominator
        self.factors = tuple(factors)
        self.cofactor = cofactor
        super().__init__(f"denominator {denominator} does not cancel")


def _check_rank(a: "LaurentPoly", b: "LaurentPoly") -> None:
    if a.rank != b.rank:
        raise ValueError(f"rank mismatch: {a.rank} vs {b.rank}")


class LaurentPoly:
    """Sparse Laurent polynomial with rational coefficients."""

    __slots__ = ("rank", "terms", "_hash")

    def __init__(self, rank: int, terms: Mapping | Iterable = ()):
        if rank < 0:
            raise ValueError("rank must be nonnegative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != rank:
                raise ValueError(f"exponent {exps} has length != rank {rank}")
            clean[exps] = clean.get(exps, 0) + Fraction(coeff)
        self.rank = rank
        self.terms = {e: c for e, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, rank: int, terms: dict) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj.rank = rank
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, rank: int) -> "LaurentPoly":
        return cls._raw(rank, {})

    @classmethod
    def constant(cls, rank: int, value: Scalar = 1) -> "LaurentPoly":
        value = Fraction(value)
        return cls._raw(rank, {(0,) * rank: value} if value else {})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff: Scalar = 1) -> "LaurentPoly":
        exps = tuple(int(e) for e in exps)
        coeff = Fraction(coeff)
        return cls._raw(len(exps), {exps: coeff} if coeff else {})

    @classmethod
    def variable(cls, rank: int, j: int) -> "LaurentPoly":
        exps = [0] * rank
        exps[j] = 1
        return cls.monomial(exps)

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.rank in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.rank, Fraction(0))

    def coefficient(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def min_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.rank
        return tuple(min(e[j] for e in self.terms) for j in range(self.rank))

    def max_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * self.rank
        return tuple(max(e[j] for e in self.terms) for j in range(self.rank))

    def shift(self, exps: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``u^exps``."""
        return LaurentPoly._raw(
            self.rank,
            {tuple(a + b for a, b in zip(e, exps)): c for e, c in self.terms.items()},
        )

    def invert_variables(self) -> "LaurentPoly":
        """Substitute ``u_j -> 1/u_j``."""
        return LaurentPoly._raw(self.rank, {tuple(-a for a in e): c for e, c in self.terms.items()})

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly | None":
        if isinstance(other, LaurentPoly):
            _check_rank(self, other)
            return other
        if isinstance(other, (int, Rational)):
            return LaurentPoly.constant(self.rank, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return LaurentPoly._raw(self.rank, terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.rank, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, LaurentPoly):
            other = Fraction(other)
            if not other:
                return LaurentPoly.zero(self.rank)
            return LaurentPoly._raw(self.rank, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return LaurentPoly._raw(self.rank, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            (e, c), = self.terms.items()
            return LaurentPoly.monomial([a * n for a in e], Fraction(1) / c ** (-n))
        result = LaurentPoly.constant(self.rank, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.rank == other.rank and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.terms == LaurentPoly.constant(self.rank, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, frozenset(self.terms.items())))
        return self._hash

    # -- evaluation / display ----------------------------------------------

    def evaluate(self, points: Sequence):
        """Evaluate at ``u_j = points[j]`` (scalars or broadcastable arrays)."""
        if len(points) != self.rank:
            raise ValueError("need one point per variable")
        cache: dict[tuple[int, int], object] = {}
        total = 0
        for exps, c in self.terms.items():
            term = float(c)
            for j, e in enumerate(exps):
                if e:
                    key = (j, e)
                    if key not in cache:
                        cache[key] = np.asarray(points[j], dtype=complex) ** e
                    term = term * cache[key]
            total = total + term
        return total

    def evaluate_exact(self, points: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for p, e in zip(points, exps):
                term *= Fraction(p) ** e
            total += term
        return total

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-a for a in t[0])))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        names = ["u"] if self.rank == 1 else [f"u{j + 1}" for j in range(self.rank)]
        pieces = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e
            )
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self.rank}, {self})"

    def to_json(self) -> list:
        return [[list(e), _frac_str(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, rank: int, data: list) -> "LaurentPoly":
        return cls(rank, [(tuple(e), parse_fraction(c)) for e, c in data])


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def format_fraction(q: Fraction) -> str:
    return _frac_str(Fraction(q))


def parse_fraction(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"rational must be a 'p/q' string, got {text!r}")
    return Fraction(text.strip())


def lp_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    _check_rank(a, b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# -- univariate dense helpers (k == 1) -----------------------------------------


def _to_dense(p: LaurentPoly) -> tuple[int, list[Fraction]]:
    if not p.terms:
        return 0, []
    lo = min(e[0] for e in p.terms)
    hi = max(e[0] for e in p.terms)
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for (e,), c in p.terms.items():
        coeffs[e - lo] = c
    return lo, coeffs


def _from_dense(coeffs: Sequence[Fraction], shift: int = 0) -> LaurentPoly:
    return LaurentPoly._raw(1, {(i + shift,): c for i, c in enumerate(coeffs) if c})


def _dense_trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def _dense_divmod(a: list, b: list) -> tuple[list, list]:
    a = _dense_trim(list(a))
    b = _dense_trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    return q, _dense_trim(a[: len(b) - 1])


def dense_gcd(a: list, b: list) -> list:
    """Monic GCD of two dense univariate polynomials over Q."""
    a = _dense_trim(list(a))
    b = _dense_trim(list(b))
    while b:
        _, r = _dense_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def univariate_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """GCD in Q[u, 1/u], normalized to nonnegative exponents, nonzero constant term, monic."""
    if p.rank != 1 or q.rank != 1:
        raise ValueError("univariate_gcd needs rank 1")
    _, a = _to_dense(p)
    _, b = _to_dense(q)
    return _from_dense(dense_gcd(a, b))


# -- multivariate division ------------------------------------------------------


def _normalize_shift(p: LaurentPoly) -> tuple[Exponent, LaurentPoly]:
    lo = p.min_exponents()
    return lo, p.shift([-a for a in lo])


def poly_divmod(p: LaurentPoly, g: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder by a single divisor, lex order, nonnegative exponents.

    The remainder is zero iff ``g`` divides ``p`` in the polynomial ring.
    """
    _check_rank(p, g)
    if not g.terms:
        raise ZeroDivisionError("polynomial division by zero")
    lt_g = max(g.terms)
    lc_g = g.terms[lt_g]
    rest = dict(p.terms)
    quot: dict[Exponent, Fraction] = {}
    rem: dict[Exponent, Fraction] = {}
    while rest:
        lt = max(rest)
        c = rest[lt]
        if all(a >= b for a, b in zip(lt, lt_g)):
            mono = tuple(a - b for a, b in zip(lt, lt_g))
            f = c / lc_g
            quot[mono] = quot.get(mono, 0) + f
            for e, gc in g.terms.items():
                key = tuple(a + b for a, b in zip(e, mono))
                v = rest.get(key, 0) - f * gc
                if v:
                    rest[key] = v
                else:
                    rest.pop(key, None)
        else:
            rem[lt] = c
            del rest[lt]
    return LaurentPoly._raw(p.rank, {e: c for e, c in quot.items() if c}), LaurentPoly._raw(p.rank, rem)


def exact_quotient(p: LaurentPoly, g: LaurentPoly) -> LaurentPoly | None:
    """``p / g`` as a Laurent polynomial, or ``None`` when ``g`` does not divide ``p``."""
    _check_rank(p, g)
    if not g.terms:
        raise ZeroDivisionError("division by zero polynomial")
    if not p.terms:
        return LaurentPoly.zero(p.rank)
    sp, p0 = _normalize_shift(p)
    sg, g0 = _normalize_shift(g)
    if g0.is_constant():
        q0 = p0 * (Fraction(1) / g0.constant_term())
    elif p.rank == 1:
        q, r = _dense_divmod(_to_dense(p0)[1], _to_dense(g0)[1])
        if r:
            return None
        q0 = _from_dense(q)
    else:
        q0, r = poly_divmod(p0, g0)
        if r:
            return None
    return q0.shift([a - b for a, b in zip(sp, sg)])


def binomial(exps: Sequence[int], c: Scalar = 1) -> LaurentPoly:
    """``1 - c * u^exps``."""
    rank = len(exps)
    return LaurentPoly.constant(rank, 1) - LaurentPoly.monomial(exps, c)


def factor_binomials(p: LaurentPoly, candidates: Iterable[LaurentPoly]):
    """Split candidate factors (with multiplicity) off ``p`` by trial division.

    Returns ``(factors, cofactor)`` with ``p == cofactor * prod(b**m)``.
    """
    factors = []
    rest = p
    for b in candidates:
        if b.is_monomial() or b.is_zero():
            continue
        mult = 0
        while True:
            q = exact_quotient(rest, b)
            if q is None:
                break
            rest = q
            mult += 1
        if mult:
            factors.append((b, mult))
    return factors, rest


# -- rational functions ---------------------------------------------------------


def _lead_coefficient(den: LaurentPoly) -> Fraction:
    return den.terms[min(den.terms)]


class LaurentRational:
    """Quotient of Laurent polynomials, kept in a canonical normal form.

    The denominator has all per-variable minimum exponents equal to zero and
    its lex-smallest coefficient equal to 1 (for ``k == 1``: nonzero constant
    term 1).  For ``k == 1`` the fraction is fully reduced.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, LaurentPoly):
            if den is None or not isinstance(den, LaurentPoly):
                raise TypeError("numerator needs a rank; pass a LaurentPoly")
            num = LaurentPoly.constant(den.rank, num)
        if den is None:
            den = LaurentPoly.constant(num.rank, 1)
        elif not isinstance(den, LaurentPoly):
            den = LaurentPoly.constant(num.rank, den)
        _check_rank(num, den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = _normalize(num, den)

    @classmethod
    def _raw(cls, num: LaurentPoly, den: LaurentPoly) -> "LaurentRational":
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def constant(cls, rank: int, value: Scalar = 1) -> "LaurentRational":
        return cls._raw(LaurentPoly.constant(rank, value), LaurentPoly.constant(rank, 1))

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "LaurentRational":
        return cls._raw(p, LaurentPoly.constant(p.rank, 1))

    @property
    def rank(self) -> int:
        return self.num.rank

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other) -> "LaurentRational | None":
        if isinstance(other, LaurentRational):
            if other.rank != self.rank:
                raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
            return other
        if isinstance(other, LaurentPoly):
            _check_rank(self.num, other)
            return LaurentRational.from_poly(other)
        if isinstance(other, (int, Rational)):
            return LaurentRational.constant(self.rank, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return LaurentRational(self.num + other.num, self.den)
        if self.rank >= 2:
            q = exact_quotient(other.den, self.den)
            if q is not None:
                return LaurentRational(self.num * q + other.num, other.den)
            q = exact_quotient(self.den, other.den)
            if q is not None:
                return LaurentRational(self.num + other.num * q, self.den)
        return LaurentRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "LaurentRational":
        return LaurentRational._raw(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            other = Fraction(other)
            if not other:
                return LaurentRational.constant(self.rank, 0)
            return LaurentRational._raw(self.num * other, self.den)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return LaurentRational.constant(self.rank, 0)
        if self.rank >= 2:
            # cheap cross-cancellation before multiplying out
            a, d2 = _cancel_pair(self.num, other.den)
            b, d1 = _cancel_pair(other.num, self.den)
            return LaurentRational(a * b, d1 * d2)
        return LaurentRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "LaurentRational":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return LaurentRational(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> "LaurentRational":
        if n < 0:
            return self.inverse() ** (-n)
        return LaurentRational(self.num ** n, self.den ** n)

    def __eq__(self, other) -> bool:
        other = self._coerce(other) if not isinstance(other, LaurentRational) else other
        if other is None:
            return NotImplemented
        if other.rank != self.rank:
            return False
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        if self.rank == 1 or self.den.is_constant():
            return hash((self.num, self.den))
        raise TypeError("multivariate LaurentRational without a canonical form is unhashable")

    def invert_variables(self) -> "LaurentRational":
        return LaurentRational(self.num.invert_variables(), self.den.invert_variables())

    def evaluate(self, points: Sequence):
        return self.num.evaluate(points) / self.den.evaluate(points)

    def evaluate_exact(self, points: Sequence[Fraction]) -> Fraction:
        return self.num.evaluate_exact(points) / self.den.evaluate_exact(points)

    def __str__(self) -> str:
        if self.den.is_constant():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self) -> str:
        return f"LaurentRational({self})"

    def to_json(self) -> dict:
        return {"numerator": self.num.to_json(), "denominator": self.den.to_json()}

    @classmethod
    def from_json(cls, rank: int, data: Mapping) -> "LaurentRational":
        return cls(LaurentPoly.from_json(rank, data["numerator"]),
                   LaurentPoly.from_json(rank, data["denominator"]))


def _cancel_pair(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Cancel ``a / b`` when one divides the other exactly."""
    if b.is_constant() or a.is_zero():
        return a, b
    q = exact_quotient(a, b)
    if q is not None:
        return q, LaurentPoly.constant(a.rank, 1)
    return a, b


def _normalize(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    rank = num.rank
    if num.is_zero():
        return num, LaurentPoly.constant(rank, 1)
    if rank == 1 and not den.is_monomial():
        sn, a = _to_dense(num)
        sd, b = _to_dense(den)
        g = dense_gcd(a, b)
        if len(g) > 1:
            a, _ = _dense_divmod(a, g)
            b, _ = _dense_divmod(b, g)
        num = _from_dense(a, sn)
        den = _from_dense(b, sd)
    lo, den = _normalize_shift(den)
    num = num.shift([-e for e in lo])
    lead = _lead_coefficient(den)
    if lead != 1:
        inv = Fraction(1) / lead
        num = num * inv
        den = den * inv
    return num, den


def reduce(f: LaurentRational, binomials: Iterable[LaurentPoly] = ()) -> LaurentRational:
    """Reduced form of ``f``.

    Rank 1: the stored form is already coprime.  Rank >= 2: exact division of
    numerator by denominator when possible, then cancellation of any
    candidate binomial dividing both.
    """
    if f.rank <= 1 or f.den.is_constant():
        return f
    q = exact_quotient(f.num, f.den)
    if q is not None:
        return LaurentRational.from_poly(q)
    num, den = f.num, f.den
    for b in binomials:
        if b.is_monomial():
            continue
        while True:
            qn = exact_quotient(num, b)
            if qn is None:
                break
            qd = exact_quotient(den, b)
            if qd is None:
                break
            num, den = qn, qd
    return LaurentRational(num, den)


def polynomialize(f: LaurentRational, binomials: Iterable[LaurentPoly] = ()) -> LaurentPoly:
    """Return ``f`` as a Laurent polynomial or raise :class:`NotPolynomial`."""
    binomials = list(binomials)
    g = reduce(f, binomials)
    if g.den.is_constant():
        return g.num * (Fraction(1) / g.den.constant_term())
    factors, cofactor = factor_binomials(g.den, binomials)
    raise NotPolynomial(g, g.den, factors, cofactor)


def sum_rational(values: Sequence[LaurentRational], binomials: Iterable[LaurentPoly] = ()) -> LaurentRational:
    """Sum over a common denominator.

    With candidate binomials (rank >= 2) each denominator is factored over
    them and the sum is taken over their least common multiple, which keeps
    the cleared numerator small.
    """
    values = list(values)
    if not values:
        raise ValueError("empty sum needs an explicit rank")
    rank = values[0].rank
    binomials = [b for b in binomials if not b.is_monomial()]
    if rank <= 1 or not binomials:
        total = LaurentRational.constant(rank, 0)
        for v in values:
            total = total + v
        return total
    split = []
    lcm: dict[LaurentPoly, int] = {}
    for v in values:
        factors, cof = factor_binomials(v.den, binomials)
        split.append((v, dict(factors), cof))
        for b, m in factors:
            lcm[b] = max(lcm.get(b, 0), m)
    common = LaurentPoly.constant(rank, 1)
    for b in binomials:
        common = common * (b ** lcm.get(b, 0))
    extra = LaurentPoly.constant(rank, 1)
    for _, _, cof in split:
        if not cof.is_constant() and exact_quotient(extra, cof) is None:
            extra = extra * cof
    common = common * extra
    num = LaurentPoly.zero(rank)
    for v, _, _ in split:
        q = exact_quotient(common, v.den)
        num = num + v.num * q
    return LaurentRational(num, common)
