"""Truncated polynomial algebra in formal Chern-root symbols.

Roots have formal degree two and carry no relations besides nilpotency:
every monomial of total degree above the truncation order is dropped.
Coefficients come from a *coefficient ring*:

* :class:`RationalFunctions` -- exact :class:`~torusindex.algebra.LaurentRational`
  values, used by the exact engine;
* :class:`NodeValues` -- complex arrays holding the value of each coefficient at
  every quadrature node, used by the numeric engine;
* :class:`Floats` -- plain floats, for averaged (renormalized) classes.

The series operations only use ``+``, ``*`` and the ring's ``scalar``,
``inverse`` and ``is_zero`` hooks, so one implementation serves all three.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .algebra import LaurentPoly, LaurentRational

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class RootSymbol:
    id: str
    kind: str = "tangent"

    def __post_init__(self):
        if self.kind not in ("tangent", "normal", "auxiliary"):
            raise ValueError(f"unknown root kind {self.kind!r}")

    def __str__(self) -> str:
        return self.id


# -- coefficient rings ----------------------------------------------------------


class RationalFunctions:
    """Exact coefficients: rational functions in ``u_1 .. u_rank``."""

    exact = True

    def __init__(self, rank: int):
        self.rank = rank

    def __eq__(self, other):
        return isinstance(other, RationalFunctions) and other.rank == self.rank

    def __hash__(self):
        return hash(("rf", self.rank))

    def scalar(self, q) -> LaurentRational:
        return LaurentRational.constant(self.rank, q)

    def monomial(self, exps: Sequence[int], coeff=1) -> LaurentRational:
        return LaurentRational.from_poly(LaurentPoly.monomial(exps, coeff))

    def is_zero(self, c) -> bool:
        return c.is_zero()

    def inverse(self, c) -> LaurentRational:
        return c.inverse()


class NodeValues:
    """Coefficients sampled at quadrature nodes ``u_j = points[j]``.

    ``points`` are broadcastable complex arrays; a coefficient is either a
    Python complex (node-independent) or an array of the broadcast shape.
    """

    exact = False

    def __init__(self, points: Sequence[np.ndarray]):
        self.points = tuple(np.asarray(p, dtype=complex) for p in points)
        self.rank = len(self.points)
        self._cache: dict[Monomial, Any] = {}

    def scalar(self, q) -> complex:
        return complex(float(q))

    def monomial(self, exps: Sequence[int], coeff=1):
        exps = tuple(int(e) for e in exps)
        if exps not in self._cache:
            val: Any = 1.0 + 0j
            for p, e in zip(self.points, exps):
                if e:
                    val = val * p ** e
            self._cache[exps] = val
        return complex(float(coeff)) * self._cache[exps]

    def is_zero(self, c) -> bool:
        return not np.any(c)

    def inverse(self, c):
        if not np.all(np.isfinite(c)) or not np.all(c):
            raise ZeroDivisionError("coefficient vanishes at a quadrature node")
        return 1.0 / c


class Floats:
    exact = False
    rank = 0

    def scalar(self, q) -> float:
        return float(q)

    def monomial(self, exps, coeff=1):
        raise TypeError("float coefficients carry no torus variables")

    def is_zero(self, c) -> bool:
        return c == 0

    def inverse(self, c):
        return 1.0 / c


# -- rational univariate power series (genus generators) -----------------------


def fraction_series_inverse(coeffs: Sequence[Fraction], n: int) -> list[Fraction]:
    """First ``n + 1`` coefficients of ``1 / f`` for ``f = sum coeffs[j] x^j``."""
    if not coeffs or not coeffs[0]:
        raise ZeroDivisionError("constant term must be invertible")
    inv = [Fraction(0)] * (n + 1)
    inv[0] = 1 / Fraction(coeffs[0])
    for j in range(1, n + 1):
        acc = sum((Fraction(coeffs[i]) * inv[j - i] for i in range(1, min(j, len(coeffs) - 1) + 1)), Fraction(0))
        inv[j] = -acc * inv[0]
    return inv


def fraction_series_mul(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * (n + 1)
    for i, ai in enumerate(a[: n + 1]):
        if ai:
            for j, bj in enumerate(b[: n + 1 - i]):
                out[i + j] += ai * bj
    return out


def exp_coefficients(scale: Fraction, n: int) -> list[Fraction]:
    """Taylor coefficients of ``exp(scale * x)`` up to ``x^n``."""
    scale = Fraction(scale)
    return [scale ** j / factorial(j) for j in range(n + 1)]


# -- the series ------------------------------------------------------------------


class TruncatedSeries:
    """Polynomial in ``roots`` truncated above total degree ``order``."""

    __slots__ = ("ring", "roots", "order", "terms")

    def __init__(self, ring, roots: Sequence[RootSymbol], order: int, terms: Mapping | Iterable = ()):
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        self.ring = ring
        self.roots = tuple(roots)
        self.order = int(order)
        if len({r.id for r in self.roots}) != len(self.roots):
            raise ValueError("root ids must be unique")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Any] = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != len(self.roots) or any(e < 0 for e in mono):
                raise ValueError(f"bad monomial {mono}")
            if sum(mono) > self.order:
                continue
            clean[mono] = clean[mono] + c if mono in clean else c
        self.terms = {m: c for m, c in clean.items() if not ring.is_zero(c)}

    @classmethod
    def _raw(cls, ring, roots, order, terms) -> "TruncatedSeries":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.roots = roots
        obj.order = order
        obj.terms = terms
        return obj

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, ring, roots, order) -> "TruncatedSeries":
        return cls._raw(ring, tuple(roots), order, {})

    @classmethod
    def constant(cls, ring, roots, order, value) -> "TruncatedSeries":
        roots = tuple(roots)
        return cls(ring, roots, order, {(0,) * len(roots): value})

    @classmethod
    def one(cls, ring, roots, order) -> "TruncatedSeries":
        return cls.constant(ring, roots, order, ring.scalar(1))

    @classmethod
    def root(cls, ring, roots, order, symbol: RootSymbol, coeff=None) -> "TruncatedSeries":
        roots = tuple(roots)
        idx = roots.index(symbol)
        mono = tuple(1 if i == idx else 0 for i in range(len(roots)))
        return cls(ring, roots, order, {mono: ring.scalar(1) if coeff is None else coeff})

    @classmethod
    def univariate(cls, ring, roots, order, symbol: RootSymbol | None,
                   coeffs: Sequence[Fraction]) -> "TruncatedSeries":
        """``sum coeffs[j] * symbol^j`` with rational ``coeffs``."""
        roots = tuple(roots)
        if symbol is None:
            return cls.constant(ring, roots, order, ring.scalar(coeffs[0] if coeffs else 0))
        idx = roots.index(symbol)
        terms = {}
        for j, c in enumerate(coeffs[: order + 1]):
            if c:
                terms[tuple(j if i == idx else 0 for i in range(len(roots)))] = ring.scalar(c)
        return cls._raw(ring, roots, order, terms)

    # -- queries ----------------------------------------------------------------

    def _check(self, other: "TruncatedSeries") -> None:
        if self.order != other.order:
            raise ValueError(f"mismatched truncation: {self.order} vs {other.order}")
        if self.roots != other.roots:
            raise ValueError("series over different root universes")

    def constant_term(self):
        return self.terms.get((0,) * len(self.roots), self.ring.scalar(0))

    def coefficient(self, mono: Sequence[int]):
        return self.terms.get(tuple(mono), self.ring.scalar(0))

    def degree_part(self, d: int) -> dict[Monomial, Any]:
        return {m: c for m, c in self.terms.items() if sum(m) == d}

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot raise the truncation order of an existing series")
        return TruncatedSeries._raw(self.ring, self.roots, order,
                                    {m: c for m, c in self.terms.items() if sum(m) <= order})

    def map_coefficients(self, fn, ring=None) -> "TruncatedSeries":
        ring = self.ring if ring is None else ring
        return TruncatedSeries(ring, self.roots, self.order, {m: fn(c) for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.order != other.order or self.roots != other.roots:
            return False
        diff = self - other
        return diff.is_zero()

    __hash__ = None

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.ring, self.roots, self.order, _lift(self.ring, other))
        self._check(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms[m] + c if m in terms else c
        return TruncatedSeries._raw(self.ring, self.roots, self.order,
                                    {m: c for m, c in terms.items() if not self.ring.is_zero(c)})

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(self.ring, self.roots, self.order, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(self.ring, self.roots, self.order, _lift(self.ring, other))
        return self + (-other)

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def scale(self, c) -> "TruncatedSeries":
        """Multiply every coefficient by the ring element (or rational) ``c``."""
        c = _lift(self.ring, c)
        return TruncatedSeries(self.ring, self.roots, self.order, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other) -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        terms: dict[Monomial, Any] = {}
        m_max = self.order
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2 in other.terms.items():
                if d1 + sum(m2) > m_max:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                p = c1 * c2
                terms[m] = terms[m] + p if m in terms else p
        return TruncatedSeries._raw(self.ring, self.roots, self.order,
                                    {m: c for m, c in terms.items() if not self.ring.is_zero(c)})

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TruncatedSeries":
        if n < 0:
            return ts_inverse(self) ** (-n)
        out = TruncatedSeries.one(self.ring, self.roots, self.order)
        for _ in range(n):
            out = out * self
        return out

    def _nilpotent_part(self) -> "TruncatedSeries":
        zero = (0,) * len(self.roots)
        return TruncatedSeries._raw(self.ring, self.roots, self.order,
                                    {m: c for m, c in self.terms.items() if m != zero})

    def compose(self, coeffs: Sequence) -> "TruncatedSeries":
        """``sum coeffs[j] * a^j`` where ``a`` is this series' nilpotent part.

        ``coeffs`` are ring elements or rationals; only ``order + 1`` of them matter.
        """
        a = self._nilpotent_part()
        out = TruncatedSeries.zero(self.ring, self.roots, self.order)
        power = TruncatedSeries.one(self.ring, self.roots, self.order)
        for j in range(self.order + 1):
            if j < len(coeffs):
                c = coeffs[j]
                if not (isinstance(c, (int, Fraction)) and c == 0):
                    out = out + power.scale(c)
            if j < self.order:
                power = power * a
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(r.id if e == 1 else f"{r.id}^{e}" for r, e in zip(self.roots, m) if e)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TruncatedSeries(order={self.order}, {self})"


def _lift(ring, c):
    if isinstance(c, (int, Fraction)):
        return ring.scalar(c)
    return c


# -- named operations ---------------------------------------------------------


def ts_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def ts_inverse(a: TruncatedSeries) -> TruncatedSeries:
    """Two-sided inverse up to truncation (Neumann series around the constant term)."""
    c0 = a.constant_term()
    if a.ring.is_zero(c0):
        raise ZeroDivisionError("constant term is not invertible")
    inv0 = a.ring.inverse(c0)
    # a = c0 (1 + b), 1/a = inv0 * sum (-b)^j
    b = a._nilpotent_part().scale(inv0)
    signs = [Fraction((-1) ** j) for j in range(a.order + 1)]
    return b.compose(signs).scale(inv0)


def ts_exp(a: TruncatedSeries) -> TruncatedSeries:
    """Exponential of a series with vanishing constant term."""
    if not a.ring.is_zero(a.constant_term()):
        raise ValueError("ts_exp needs a series with zero constant term")
    return a.compose([Fraction(1, factorial(j)) for j in range(a.order + 1)])


def _binom_half(j: int) -> Fraction:
    out = Fraction(1)
    for i in range(j):
        out *= (Fraction(1, 2) - i) / (i + 1)
    return out


def ts_sqrt(a: TruncatedSeries) -> TruncatedSeries:
    """Square root of a series with constant term 1 (binomial series)."""
    c0 = a.constant_term()
    one = a.ring.scalar(1)
    if not a.ring.is_zero(c0 - one):
        raise ValueError("ts_sqrt needs constant term 1")
    return a.compose([_binom_half(j) for j in range(a.order + 1)])
