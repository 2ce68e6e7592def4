"""Characteristic factors as truncated series in Chern roots.

Every builder takes the roots it acts on plus optional ``ring`` and
``universe`` keywords: ``universe`` is the full root tuple of the component
(so series from different builders can be multiplied) and ``ring`` is the
coefficient ring.  Without them a builder works over just its own roots with
exact rational-function coefficients, which is handy interactively::

    >>> print(dirac_factor((1,), None, 0))
    (u) / (1 - u^2)

A normal line of integer weight ``w`` is twisted by ``z = u^(2w)``, so the
half powers ``z^(1/2)`` are the monomials ``u^(+-w)``.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from .series import (
    RationalFunctions,
    RootSymbol,
    TruncatedSeries,
    exp_coefficients,
    fraction_series_inverse,
    fraction_series_mul,
    ts_inverse,
)


class OperatorKind(str, Enum):
    DIRAC = "dirac"
    SIGNATURE = "signature"
    EULER = "euler"
    CUSTOM = "custom"


WeightVector = tuple[int, ...]


def _setup(roots, ring, universe, rank=0):
    roots = tuple(r for r in roots if r is not None)
    if universe is None:
        universe = roots
    if ring is None:
        ring = RationalFunctions(rank)
    return roots, ring, tuple(universe)


def _product(ring, universe, m, factors: Iterable[TruncatedSeries]) -> TruncatedSeries:
    out = TruncatedSeries.one(ring, universe, m)
    for f in factors:
        out = out * f
    return out


# -- univariate generators -------------------------------------------------------


def ahat_coefficients(n: int) -> list[Fraction]:
    """Taylor coefficients of (x/2)/sinh(x/2) through x^n."""
    sinhc = [Fraction(0)] * (n + 1)
    for j in range(0, n + 1, 2):
        sinhc[j] = Fraction(1, 2 ** j * factorial(j + 1))
    return fraction_series_inverse(sinhc, n)


def l_coefficients(n: int, normalization: str = "atiyah-singer") -> list[Fraction]:
    """Taylor coefficients of the L-genus generator through x^n.

    ``"atiyah-singer"`` is x/tanh(x/2), the normalization paired with the
    signature normal factor; ``"hirzebruch"`` is x/tanh(x).  Both give the same
    top-degree part on a component, hence the same signature of a closed
    manifold, but only the first is consistent with :func:`sign_factor` in
    lower degrees.
    """
    if normalization == "atiyah-singer":
        half = Fraction(1, 2)
        cosh = [half ** j / factorial(j) if j % 2 == 0 else Fraction(0) for j in range(n + 1)]
        out = fraction_series_mul(cosh, ahat_coefficients(n), n)
        return [2 * c for c in out]
    if normalization == "hirzebruch":
        cosh = [Fraction(1, factorial(j)) if j % 2 == 0 else Fraction(0) for j in range(n + 1)]
        sinhc = [Fraction(1, factorial(j + 1)) if j % 2 == 0 else Fraction(0) for j in range(n + 1)]
        return fraction_series_mul(cosh, fraction_series_inverse(sinhc, n), n)
    raise ValueError(f"unknown L-genus normalization {normalization!r}")


# -- tangent genera -----------------------------------------------------------------


def ahat_genus(roots: Sequence[RootSymbol], m: int, *, ring=None, universe=None) -> TruncatedSeries:
    roots, ring, universe = _setup(roots, ring, universe)
    coeffs = ahat_coefficients(m)
    return _product(ring, universe, m,
                    (TruncatedSeries.univariate(ring, universe, m, r, coeffs) for r in roots))


def l_genus(roots: Sequence[RootSymbol], m: int, *, ring=None, universe=None,
            normalization: str = "atiyah-singer") -> TruncatedSeries:
    roots, ring, universe = _setup(roots, ring, universe)
    coeffs = l_coefficients(m, normalization)
    return _product(ring, universe, m,
                    (TruncatedSeries.univariate(ring, universe, m, r, coeffs) for r in roots))


def euler_form(roots: Sequence[RootSymbol], m: int, *, ring=None, universe=None) -> TruncatedSeries:
    """Top Chern class: the product of the roots (1 on a point)."""
    roots, ring, universe = _setup(roots, ring, universe)
    return _product(ring, universe, m, (TruncatedSeries.root(ring, universe, m, r) for r in roots))


# -- normal factors -----------------------------------------------------------------


def _check_weight(w: Sequence[int]) -> WeightVector:
    w = tuple(int(a) for a in w)
    if not any(w):
        raise ValueError(f"zero normal weight {w}: the line lies in every hyperplane n^perp")
    return w


def _half_twisted(w, root, m, ring, universe, sign: int) -> TruncatedSeries:
    """``u^(-w) e^(x/2) + sign * u^(w) e^(-x/2)``."""
    plus = TruncatedSeries.univariate(ring, universe, m, root, exp_coefficients(Fraction(1, 2), m))
    minus = TruncatedSeries.univariate(ring, universe, m, root, exp_coefficients(Fraction(-1, 2), m))
    return plus.scale(ring.monomial([-a for a in w])) + minus.scale(ring.monomial(w, sign))


def dirac_factor(w: Sequence[int], root: RootSymbol | None, m: int, *, ring=None,
                 universe=None) -> TruncatedSeries:
    """1 / (z^(-1/2) e^(x/2) - z^(1/2) e^(-x/2)) for one normal line."""
    w = _check_weight(w)
    roots, ring, universe = _setup([root], ring, universe, rank=len(w))
    return ts_inverse(_half_twisted(w, root, m, ring, universe, -1))


def sign_factor(w: Sequence[int], root: RootSymbol | None, m: int, *, ring=None,
                universe=None) -> TruncatedSeries:
    """(z^(-1/2) e^(x/2) + z^(1/2) e^(-x/2)) / (z^(-1/2) e^(x/2) - z^(1/2) e^(-x/2))."""
    w = _check_weight(w)
    roots, ring, universe = _setup([root], ring, universe, rank=len(w))
    num = _half_twisted(w, root, m, ring, universe, +1)
    return num * ts_inverse(_half_twisted(w, root, m, ring, universe, -1))


def aux_character(lines: Sequence[tuple[Sequence[int], int, RootSymbol | None]], m: int, *,
                  ring=None, universe=None, rank: int | None = None) -> TruncatedSeries:
    """Equivariant Chern character sum(parity * u^(2w) * e^x) of a sum of lines."""
    lines = list(lines)
    if rank is None:
        rank = len(lines[0][0]) if lines else (ring.rank if ring is not None else 0)
    roots, ring, universe = _setup([r for _, _, r in lines], ring, universe, rank=rank)
    out = TruncatedSeries.zero(ring, universe, m)
    exp1 = exp_coefficients(Fraction(1), m)
    for w, parity, root in lines:
        if parity not in (1, -1):
            raise ValueError(f"parity must be +1 or -1, got {parity}")
        e = TruncatedSeries.univariate(ring, universe, m, root, exp1)
        out = out + e.scale(ring.monomial([2 * a for a in w], parity))
    return out
