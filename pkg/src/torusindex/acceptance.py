"""Acceptance checks, shared by ``torusindex selftest`` and the test suite.

Each check returns a :class:`CheckResult`; none raises on a failed
property.  ``overrides`` replaces built-in datasets by name, which is how a
deliberately broken dataset is fed through the same checks.
"""

from __future__ import annotations

import itertools
import math
import random
import re
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .algebra import LaurentPoly, LaurentRational, binomial, exact_quotient, reduce
from .averaging import (
    Chamber,
    ChamberError,
    SingularityNotCancelled,
    av_numeric,
    ball_average,
    chamber_validate,
    default_chamber,
    index_compute,
    numeric_contributions,
    random_chamber,
)
from .characteristic import OperatorKind, dirac_factor, sign_factor
from .datasets import BUILTINS
from .localization import Dataset, contributions, integrate_component, product, tangent_genus
from .series import RationalFunctions, RootSymbol, TruncatedSeries, ts_exp, ts_inverse, ts_sqrt

SEED = 20240611


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.1f}s)"


class _Catalog:
    def __init__(self, overrides: Mapping[str, Dataset] | None):
        self.overrides = dict(overrides or {})

    def get(self, name: str) -> Dataset:
        if name in self.overrides:
            return self.overrides[name]
        return BUILTINS[name].build()

    def names(self):
        return sorted(BUILTINS)


def _exact(d: Dataset, op=None) -> Fraction:
    return index_compute(d, "exact", op=op).exact_index


def _constant(f: LaurentRational) -> Fraction:
    if not (f.num.is_constant() and f.den.is_constant()):
        raise ValueError(f"{f} is not a constant")
    return f.num.constant_term() / f.den.constant_term()


def _failures(items) -> str:
    items = list(items)
    return "; ".join(items[:4]) + (f" (+{len(items) - 4} more)" if len(items) > 4 else "")


# -- 1 ------------------------------------------------------------------------------


def check_euler(cat: _Catalog) -> tuple[bool, str]:
    bad = []
    for name, want in (("cp2-t2", 3), ("s2-rotation", 2), ("cp1xcp1", 4)):
        try:
            got = _exact(cat.get(name), OperatorKind.EULER)
        except SingularityNotCancelled as exc:
            got = f"not cancelled ({exc.denominator})"
        if got != want:
            bad.append(f"{name}: euler {got} != {want}")
    s2 = cat.get("s2-rotation")
    try:
        prod = _exact(product(s2, s2), OperatorKind.EULER)
        single = _exact(s2, OperatorKind.EULER)
        if prod != single * single:
            bad.append(f"product multiplicativity: {prod} != {single}^2")
    except SingularityNotCancelled as exc:
        bad.append(f"product multiplicativity: not cancelled ({exc.denominator})")
    return not bad, _failures(bad) or "cp2-t2 = 3, s2 = 2, cp1xcp1 = 4 = 2*2"


# -- 2 ------------------------------------------------------------------------------


def check_dirac(cat: _Catalog) -> tuple[bool, str]:
    bad, seen = [], 0
    for name in cat.names():
        info = BUILTINS[name]
        d = cat.get(name)
        if not info.spin or any(c.aux_lines for c in d.components):
            continue
        try:
            got = _exact(d, OperatorKind.DIRAC)
        except SingularityNotCancelled as exc:
            bad.append(f"{name}: not cancelled ({exc.denominator})")
            continue
        want = 0 if d.rank >= 1 else info.expected[OperatorKind.DIRAC.value]
        seen += 1
        if got != want:
            bad.append(f"{name}: dirac {got} != {want}")
    return not bad, _failures(bad) or f"{seen} spin datasets vanish for k >= 1; k3 gives its A-hat number 2"


# -- 3 ------------------------------------------------------------------------------


def check_signature(cat: _Catalog) -> tuple[bool, str]:
    bad, parts = [], []
    for name, want in (("cp2-s1", 1.0), ("cp1xcp1-diag", 0.0)):
        r = index_compute(cat.get(name), "numeric", nodes=4096, op=OperatorKind.SIGNATURE)
        parts.append(f"{name} {r.numeric_index:.3g}")
        if not abs(r.numeric_index - want) <= 1e-9:
            bad.append(f"{name}: numeric signature {r.numeric_index!r} != {want} within 1e-9")
    return not bad, _failures(bad) or ", ".join(parts) + " at N = 4096"


# -- 4 ------------------------------------------------------------------------------


def check_divergence(cat: _Catalog) -> tuple[bool, str]:
    d = cat.get("example9-n11")
    bad = []
    u = LaurentPoly.variable(1, 0)
    target = (u ** -1 - u) ** 2
    try:
        index_compute(d, "exact")
        bad.append("exact engine returned a value")
    except SingularityNotCancelled as exc:
        if exact_quotient(exc.denominator, target) is None:
            bad.append(f"certificate {exc.denominator} not divisible by (u^-1 - u)^2")
    if not chamber_validate((0,), d):
        bad.append("Q = 0 accepted by the chamber validator")
    try:
        index_compute(d, "numeric", chamber=(0,))
        bad.append("numeric engine ran at Q = 0")
    except ChamberError:
        pass
    return not bad, _failures(bad) or "certificate divisible by (u^-1 - u)^2; Q = 0 rejected"


# -- 5 ------------------------------------------------------------------------------


def check_chamber(cat: _Catalog) -> tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    bad, count = [], 0
    for name in cat.names():
        info = BUILTINS[name]
        d = cat.get(name)
        if not info.geometric or d.rank == 0:
            continue
        totals = []
        for _ in range(5):
            ch = random_chamber(d, rng)
            totals.append(index_compute(d, "numeric", ch).numeric_index)
        spread = max(totals) - min(totals)
        count += 1
        if not spread <= 1e-9:
            bad.append(f"{name}: totals spread {spread:.2e} across chambers")
    d = cat.get("example9-augmented").with_operator(OperatorKind.SIGNATURE)
    per = []
    for _ in range(5):
        ch = random_chamber(d, rng)
        per.append([a.value.real for a in numeric_contributions(d, ch, 256)])
    per = np.array(per)
    moved = float(np.max(per.max(axis=0) - per.min(axis=0)))
    if not moved > 1e-3:
        bad.append(f"example9-augmented: per-component values never moved (max spread {moved:.2e})")
    return not bad, _failures(bad) or (f"{count} datasets invariant to 1e-9 over 5 chambers; "
                                         f"example9-augmented per-component spread {moved:.3g}")


# -- 6 ------------------------------------------------------------------------------


def check_crossval(cat: _Catalog) -> tuple[bool, str]:
    bad, count, worst = [], 0, 0.0
    for name in cat.names():
        d = cat.get(name)
        ops = [OperatorKind.DIRAC, OperatorKind.SIGNATURE, OperatorKind.EULER]
        if any(c.aux_lines for c in d.components):
            ops.append(OperatorKind.CUSTOM)
        for op in ops:
            try:
                exact = _exact(d, op)
            except SingularityNotCancelled:
                continue
            nodes = 4096 if d.rank == 1 else None
            num = index_compute(d, "numeric", nodes=nodes, op=op).numeric_index
            err = abs(num - float(exact))
            worst = max(worst, err)
            count += 1
            if not err <= 1e-9:
                bad.append(f"{name}/{op.value}: |{num!r} - {exact}| = {err:.2e}")
    return not bad, _failures(bad) or f"{count} (dataset, operator) pairs, worst deviation {worst:.2e}"


# -- 7 ------------------------------------------------------------------------------


def _term_sup(d: Dataset, ch: Chamber, n: int) -> float:
    return max(a.sup for a in numeric_contributions(d, ch, n, op=OperatorKind.DIRAC))


def check_lambda(cat: _Catalog) -> tuple[bool, str]:
    bad, notes = [], []
    for name, q in (("s2-rotation", (2,)), ("cp3-s1-0011", (2,)), ("cp1xcp1", (2, 3))):
        d = cat.get(name)
        base = Chamber(q)
        mags = []
        for lam in (1, 2, 4, 8):
            ch = base.scaled(lam)
            n = 256 if d.rank == 1 else 128
            total = index_compute(d, "numeric", ch, n, op=OperatorKind.DIRAC).numeric_index
            if not abs(total) <= 1e-9:
                bad.append(f"{name}: dirac index {total:.2e} at lambda = {lam}")
            mags.append(_term_sup(d, ch, n))
        if any(b > a for a, b in zip(mags, mags[1:])):
            bad.append(f"{name}: per-term magnitudes not monotone {['%.2e' % m for m in mags]}")
        if not mags[-1] < 1e-3:
            bad.append(f"{name}: per-term magnitude {mags[-1]:.2e} at lambda = 8")
        notes.append(f"{name} {mags[-1]:.1e}")
    for name in ("cp2-s1-011", "example9-augmented", "cp2-t2"):
        d = cat.get(name).with_operator(OperatorKind.SIGNATURE)
        ch = default_chamber(d).scaled(16)
        values = numeric_contributions(d, ch, 256)
        for c, avg in zip(d.sorted_components(), values):
            genus = integrate_component(tangent_genus(c, OperatorKind.SIGNATURE, d.rank), c).value
            sign = c.sign
            for w in c.normal_weights():
                sign *= -1 if sum(a * b for a, b in zip(ch.q, w)) > 0 else 1
            want = float(sign * _constant(genus))
            if not abs(avg.value.real - want) <= 1e-6:
                bad.append(f"{name}/{c.name}: {avg.value.real:.8g} != L-integral {want:g}")
    return not bad, _failures(bad) or ("dirac terms decay (lambda = 8 sup: " + ", ".join(notes)
                                         + "); signature terms match L-integrals at lambda = 16")


# -- 8 ------------------------------------------------------------------------------

CASES = 200


def _rand_fraction(r: random.Random) -> Fraction:
    return Fraction(r.randint(-5, 5), r.randint(1, 4))


def random_poly(r: random.Random, rank: int, terms: int = 3, span: int = 3) -> LaurentPoly:
    out = {}
    for _ in range(r.randint(0, terms)):
        out[tuple(r.randint(-span, span) for _ in range(rank))] = _rand_fraction(r)
    return LaurentPoly(rank, out)


def random_weight(r: random.Random, rank: int) -> tuple[int, ...]:
    while True:
        w = tuple(r.randint(-2, 2) for _ in range(rank))
        if any(w):
            return w


def random_rational(r: random.Random, rank: int = 1) -> LaurentRational:
    num = random_poly(r, rank)
    den = LaurentPoly.monomial([r.randint(-2, 2) for _ in range(rank)], r.choice([1, 2, -3]))
    for _ in range(r.randint(0, 2)):
        den = den * binomial([2 * a for a in random_weight(r, rank)])
    return LaurentRational(num, den)


def random_series(r: random.Random, ring, roots, order: int, *, constant=None, rank: int = 1):
    terms = {}
    for mono in itertools.product(range(order + 1), repeat=len(roots)):
        if sum(mono) > order or r.random() < 0.4:
            continue
        if sum(mono) == 0:
            continue
        terms[mono] = LaurentRational(random_poly(r, rank, terms=2, span=2))
    s = TruncatedSeries(ring, roots, order, terms)
    if constant is not None:
        s = s + TruncatedSeries.constant(ring, roots, order, constant)
    return s


def _negate_roots(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(s.ring, s.roots, s.order,
                           {m: (c if sum(m) % 2 == 0 else -c) for m, c in s.terms.items()})


def algebra_suites(cases: int = CASES, seed: int = SEED) -> list[str]:
    """Randomized exact identities; returns the failures (empty on success)."""
    r = random.Random(seed)
    bad = []
    for i in range(cases):
        k = 1 + i % 2
        a, b, c = (random_poly(r, k) for _ in range(3))
        if not ((a + b) + c == a + (b + c) and a + b == b + a and (a * b) * c == a * (b * c)
                and a * b == b * a and a * (b + c) == a * b + a * c and a - a == LaurentPoly.zero(k)):
            bad.append(f"poly ring axioms case {i}")
        f, g, h = (random_rational(r) for _ in range(3))
        if not ((f + g) + h == f + (g + h) and f * (g + h) == f * g + f * h and f * g == g * f):
            bad.append(f"rational ring axioms case {i}")
        if not f.is_zero() and f * f.inverse() != LaurentRational.constant(1, 1):
            bad.append(f"rational inverse case {i}")
    for i in range(cases):
        f = random_rational(r, 1 + i % 2)
        once = reduce(f)
        if reduce(once) != once or (once.num, once.den) != (reduce(once).num, reduce(once).den):
            bad.append(f"reduce idempotence case {i}")
        if once != f:
            bad.append(f"reduce changed the value, case {i}")
    ring = RationalFunctions(1)
    for i in range(cases):
        roots = tuple(RootSymbol(f"x{j}", "tangent") for j in range(1 + i % 2))
        order = r.randint(0, 3)
        a = random_series(r, ring, roots, order, constant=random_rational(r) or LaurentRational.constant(1, 1))
        one = TruncatedSeries.one(ring, roots, order)
        if a * ts_inverse(a) != one:
            bad.append(f"series inverse case {i}")
        p = random_series(r, ring, roots, order)
        q = random_series(r, ring, roots, order)
        if ts_exp(p + q) != ts_exp(p) * ts_exp(q):
            bad.append(f"series exp case {i}")
        s = random_series(r, ring, roots, order, constant=LaurentRational.constant(1, 1))
        if ts_sqrt(s) ** 2 != s:
            bad.append(f"series sqrt case {i}")
    for i in range(cases):
        k = 1 + i % 2
        w = random_weight(r, k)
        order = r.randint(0, 3)
        x = RootSymbol("n1", "normal") if i % 3 else None
        for factor in (dirac_factor, sign_factor):
            lhs = factor(tuple(-a for a in w), x, order)
            rhs = -_negate_roots(factor(w, x, order))
            if lhs != rhs:
                bad.append(f"{factor.__name__} parity case {i} (w = {w})")
    return bad


def check_algebra(cat: _Catalog) -> tuple[bool, str]:
    bad = algebra_suites()
    return not bad, _failures(bad) or f"{CASES} cases each: ring axioms, reduce, inverse/exp/sqrt, factor parity"


# -- 9 ------------------------------------------------------------------------------


def check_ball(cat: _Catalog) -> tuple[bool, str]:
    d = cat.get("s2-rotation").with_operator(OperatorKind.SIGNATURE)
    radius = 200 * 2 * math.pi
    q = default_chamber(d)
    bad, notes = [], []
    cons = contributions(d)
    funcs = [c.value.evaluate for c in cons]

    def total(u):
        return sum(f((u,)) for f in funcs)

    exact_total = float(_exact(d))
    got = ball_average(total, 1, radius)
    notes.append(f"sum {got:.2e}")
    if not abs(got - exact_total) <= 1e-2:
        bad.append(f"ball average of the sum {got:.4g} != {exact_total}")
    for c, f in zip(cons, funcs):
        want = av_numeric(lambda u, f=f: f((u,)), q, 1024).value.real
        got = ball_average(lambda u, f=f: f((u,)), 1, radius, shift=[float(x) for x in q.q])
        notes.append(f"{c.name} {got:.3f}/{want:.3f}")
        if not abs(got - want) <= 1e-2:
            bad.append(f"{c.name}: shifted ball average {got:.4g} != constant coefficient {want:.4g}")
    return not bad, _failures(bad) or "R = 400 pi: " + ", ".join(notes)


CHECKS: list[tuple[str, Callable]] = [
    ("1-euler-specialization", check_euler),
    ("2-dirac-vanishing", check_dirac),
    ("3-signature-specialization", check_signature),
    ("4-per-term-divergence", check_divergence),
    ("5-chamber-invariance", check_chamber),
    ("6-exact-numeric-crossval", check_crossval),
    ("7-lambda-scaling", check_lambda),
    ("8-algebraic-invariants", check_algebra),
    ("9-ball-average", check_ball),
]


def run_check(name: str, fn: Callable, cat: _Catalog) -> CheckResult:
    t = time.perf_counter()
    try:
        passed, detail = fn(cat)
    except Exception as exc:  # a crash is a failure of that invariant, not of the runner
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(name, passed, detail, time.perf_counter() - t)


def run_checks(pattern: str | None = None, overrides: Mapping[str, Dataset] | None = None) -> list[CheckResult]:
    cat = _Catalog(overrides)
    rx = re.compile(pattern) if pattern else None
    return [run_check(name, fn, cat) for name, fn in CHECKS if rx is None or rx.search(name)]
