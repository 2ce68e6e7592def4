"""The torus average of localized contributions, exactly and by quadrature.

Exact engine: put the per-component rational functions over a common
denominator, certify that the total is a Laurent polynomial by exact
division, and read off the coefficient of ``u^0``.

Numeric engine: sample every contribution on the shifted torus
``|u_j| = exp(Q_j / 2)`` with an equispaced (trapezoidal) rule and take the
mean.  Integrands are holomorphic in an annulus around each shifted circle
as long as ``Q . n != 0`` for every normal weight ``n``, so the rule
converges geometrically; the error estimate compares ``N`` with the nested
``N/2`` rule.  Single contributions depend on the chamber of ``Q``; their
sum does not.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np

from .algebra import (
    LaurentPoly,
    LaurentRational,
    NotPolynomial,
    binomial,
    exact_quotient,
    format_fraction,
    parse_fraction,
    polynomialize,
    sum_rational,
)
from .characteristic import OperatorKind
from .localization import (
    Dataset,
    DatasetError,
    FixedComponent,
    assemble_integrand,
    contributions,
    dataset_validate,
    integrate_component,
    normal_part,
    tangent_genus,
)
from .series import Floats, NodeValues, TruncatedSeries


EPS = np.finfo(float).eps
MAX_GRID_POINTS = 1 << 18


class ChamberError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SingularityNotCancelled(NotPolynomial):
    """The summed contributions keep a pole on the unit torus."""

    def __init__(self, value, denominator, factors=(), cofactor=None, report=None):
        super().__init__(value, denominator, factors, cofactor)
        self.report = report


# -- chambers ---------------------------------------------------------------------


@dataclass(frozen=True)
class Chamber:
    q: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(Fraction(x) for x in self.q))

    @property
    def rank(self) -> int:
        return len(self.q)

    def radii(self) -> tuple[float, ...]:
        return tuple(math.exp(float(x) / 2) for x in self.q)

    def scaled(self, lam) -> "Chamber":
        return Chamber(tuple(Fraction(lam) * x for x in self.q))

    def margin(self, weights) -> float:
        """min |Q.n| / (2 max|n_j|), the decay rate that sets the node count."""
        out = math.inf
        for w in weights:
            dot = abs(sum(float(a) * b for a, b in zip(self.q, w)))
            out = min(out, dot / (2 * max(abs(b) for b in w)))
        return out

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.q)


def _weights_of(d_or_weights) -> list[tuple[int, ...]]:
    if isinstance(d_or_weights, Dataset):
        return d_or_weights.normal_weights()
    return [tuple(w) for w in d_or_weights]


def chamber_validate(q, d_or_weights) -> list[str]:
    """Violations (empty when ``Q . n != 0`` for every normal weight)."""
    q = q if isinstance(q, Chamber) else Chamber(tuple(q))
    out = []
    for w in _weights_of(d_or_weights):
        if len(w) != q.rank:
            out.append(f"chamber has length {q.rank}, weight {list(w)} has length {len(w)}")
        elif sum(a * b for a, b in zip(q.q, w)) == 0:
            out.append(f"Q = ({q}) lies on the hyperplane n^perp for n = {list(w)}")
    return out


def default_chamber(d: Dataset, max_steps: int = 10_000) -> Chamber:
    """Q_j = (2j+1)/7, nudged by 1/101 on one coordinate per step (round robin) until valid."""
    q = [Fraction(2 * j + 1, 7) for j in range(d.rank)]
    for step in range(max_steps):
        if not chamber_validate(q, d):
            return Chamber(tuple(q))
        q[step % d.rank] += Fraction(1, 101)
    raise ChamberError(["no valid default chamber found"])


def random_chamber(d: Dataset, rng: np.random.Generator, *, scale: float | None = None,
                   min_margin: float = 0.5, denominator: int = 1000) -> Chamber:
    """A random rational chamber whose margin is at least ``min_margin``.

    Coordinates are uniform in ``[-scale, scale]``; the default scale grows
    with the rank and the largest weight entry so such chambers exist.
    """
    weights = d.normal_weights()
    if scale is None:
        top = max((abs(a) for w in weights for a in w), default=1)
        scale = max(2, d.rank + 1) * top
    bound = int(scale * denominator)
    for _ in range(100_000):
        q = tuple(Fraction(int(x), denominator) for x in rng.integers(-bound, bound + 1, d.rank))
        ch = Chamber(q)
        if not chamber_validate(ch, weights) and (not weights or ch.margin(weights) >= min_margin):
            return ch
    raise ChamberError(["could not sample a chamber with the requested margin"])


def as_chamber(q, d: Dataset) -> Chamber:
    if q is None or q == "auto":
        return default_chamber(d)
    if isinstance(q, Chamber):
        return q
    if isinstance(q, str):
        q = [parse_fraction(x) for x in q.split(",") if x.strip()]
    ch = Chamber(tuple(q))
    if ch.rank != d.rank:
        raise ChamberError([f"chamber has length {ch.rank}, dataset rank is {d.rank}"])
    return ch


def auto_nodes(d: Dataset, chamber: Chamber) -> int:
    """Smallest power of two with predicted aliasing below ~1e-16, within a grid budget."""
    if d.rank == 0:
        return 1
    margin = chamber.margin(d.normal_weights()) if d.normal_weights() else math.inf
    need = 64 if margin == math.inf else max(64, math.ceil(38.0 / margin))
    cap = {1: 1 << 14, 2: 1 << 11}.get(d.rank, 256 if d.rank == 3 else 64)
    n = 64
    while n < need and n < cap:
        n *= 2
    return n


# -- exact engine ---------------------------------------------------------------------


def dataset_binomials(d: Dataset) -> list[LaurentPoly]:
    """Distinct ``1 - u^(2n)`` over the normal weights, one per line through the origin."""
    out: list[LaurentPoly] = []
    for w in d.normal_weights():
        b = binomial([2 * a for a in w])
        if all(exact_quotient(b, x) is None or exact_quotient(x, b) is None for x in out):
            out.append(b)
    return out


def certify(values: Sequence[LaurentRational], binomials: Sequence[LaurentPoly] = ()) -> LaurentPoly:
    """The summed contributions as a Laurent polynomial, or raise :class:`SingularityNotCancelled`."""
    total = sum_rational(values, binomials)
    try:
        return polynomialize(total, binomials)
    except NotPolynomial as exc:
        raise SingularityNotCancelled(exc.value, exc.denominator, exc.factors, exc.cofactor) from None


def av_exact(values: Sequence[LaurentRational], binomials: Sequence[LaurentPoly] = ()) -> Fraction:
    """Coefficient of ``u^0`` of the (certified polynomial) sum."""
    values = list(values)
    if not values:
        return Fraction(0)
    ranks = {v.rank for v in values}
    if len(ranks) != 1:
        raise ValueError(f"contributions of mixed rank {sorted(ranks)}")
    return certify(values, binomials).constant_term()


# -- numeric engine ---------------------------------------------------------------------


@dataclass
class NumericAverage:
    value: complex
    error: float
    coarse: complex = 0j
    abs_mean: float = 0.0
    sup: float = 0.0
    nodes: int = 0
    offset: bool = False


def _grid_chunks(radii: Sequence[float], n: int, offset: bool) -> Iterator[tuple[tuple[np.ndarray, ...], np.ndarray]]:
    """Yield (points, coarse-mask) blocks covering the tensor grid, split along axis 0."""
    k = len(radii)
    if k == 0:
        yield (), np.ones((), dtype=bool)
        return
    phase = (np.arange(n) + (0.5 if offset else 0.0)) * (2 * np.pi / n)
    even = (np.arange(n) % 2) == 0
    circles = [r * np.exp(1j * phase) for r in radii]
    rows = max(1, MAX_GRID_POINTS // n ** (k - 1)) if k > 1 else n
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        pts = []
        mask = None
        for j in range(k):
            shape = [1] * k
            if j == 0:
                arr = circles[0][start:stop]
                sel = even[start:stop]
            else:
                arr = circles[j]
                sel = even
            shape[j] = arr.shape[0]
            pts.append(arr.reshape(shape))
            m = sel.reshape(shape)
            mask = m if mask is None else (mask & m)
        yield tuple(pts), mask


def _average_stats(fn: Callable, chamber: Chamber, n: int, count: int, *, offset: bool = False):
    """Run ``fn(points) -> list of arrays`` over the grid; per-output statistics."""
    radii = chamber.radii()
    k = len(radii)
    total = n ** k if k else 1
    coarse_total = (n // 2) ** k if k else 1
    full = [0j] * count
    coarse = [0j] * count
    absolute = [0.0] * count
    sup = [0.0] * count
    for pts, mask in _grid_chunks(radii, n, offset):
        shape = tuple(np.broadcast_shapes(*(p.shape for p in pts))) if pts else ()
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            outs = fn(pts)
        for i, v in enumerate(outs):
            v = np.broadcast_to(np.asarray(v, dtype=complex), shape)
            if not np.all(np.isfinite(v)):
                raise FloatingPointError("non-finite value at a quadrature node")
            full[i] += v.sum()
            coarse[i] += v[np.broadcast_to(mask, shape)].sum()
            mags = np.abs(v)
            absolute[i] += float(mags.sum())
            sup[i] = max(sup[i], float(mags.max()))
    return ([f / total for f in full], [c / coarse_total for c in coarse],
            [a / total for a in absolute], sup)


def _run_grid(fn, chamber, n, count):
    try:
        return _average_stats(fn, chamber, n, count), False
    except (FloatingPointError, ZeroDivisionError):
        warnings.warn("pole within tolerance of a quadrature node; nodes shifted by half a step",
                      RuntimeWarning, stacklevel=3)
        return _average_stats(fn, chamber, n, count, offset=True), True


def _check_nodes(n: int, rank: int) -> None:
    if rank and (n < 2 or n & (n - 1)):
        raise ValueError(f"node count {n} must be a power of two")


def _error(full, coarse, absolute) -> float:
    return abs(full - coarse) + 64 * EPS * max(absolute, abs(full))


def av_numeric(f: Callable, chamber, n: int, *, rank: int | None = None) -> NumericAverage:
    """Mean of ``f(u_1, .., u_k)`` over the shifted torus, i.e. its ``u^0`` Laurent coefficient.

    ``f`` receives one broadcastable complex array per torus variable.
    """
    chamber = chamber if isinstance(chamber, Chamber) else Chamber(tuple(chamber))
    if rank is not None and rank != chamber.rank:
        raise ValueError("chamber length differs from rank")
    _check_nodes(n, chamber.rank)
    (full, coarse, absolute, sup), offset = _run_grid(lambda pts: [f(*pts)], chamber, n, 1)
    return NumericAverage(full[0], _error(full[0], coarse[0], absolute[0]), coarse[0],
                          absolute[0], sup[0], n, offset)


def _numeric_ring(pts):
    return NodeValues(pts)


def numeric_contributions(d: Dataset, chamber: Chamber, n: int, *, op=None,
                          order: int | None = None) -> list[NumericAverage]:
    """Per-component averages (sorted by component name) on the shifted torus."""
    op = d.operator if op is None else OperatorKind(op)
    comps = d.sorted_components()
    _check_nodes(n, d.rank)

    def evaluate(pts):
        ring = _numeric_ring(pts)
        return [integrate_component(assemble_integrand(c, op, d.rank, ring=ring, order=order), c).value
                for c in comps]

    (full, coarse, absolute, sup), offset = _run_grid(evaluate, chamber, n, len(comps))
    return [NumericAverage(full[i], _error(full[i], coarse[i], absolute[i]), coarse[i],
                           absolute[i], sup[i], n, offset) for i in range(len(comps))]


def renormalized_class(c: FixedComponent, chamber: Chamber, n: int, *, op=OperatorKind.DIRAC,
                       rank: int | None = None, order: int | None = None) -> TruncatedSeries:
    """Average of the normal and auxiliary factors, coefficient by coefficient (float series)."""
    rank = chamber.rank if rank is None else rank
    problems = chamber_validate(chamber, c.normal_weights())
    if problems:
        raise ChamberError(problems)
    _check_nodes(n, rank)
    m = c.half_dim if order is None else int(order)
    monos = sorted(_all_monomials(len(c.universe), m))

    def evaluate(pts):
        s = normal_part(c, op, rank, ring=_numeric_ring(pts), order=order)
        return [s.coefficient(mono) for mono in monos]

    (full, _, _, _), _ = _run_grid(evaluate, chamber, n, len(monos))
    return TruncatedSeries(Floats(), c.universe, m, {mono: float(v.real) for mono, v in zip(monos, full)})


def _all_monomials(nvars: int, m: int):
    def rec(i, left):
        if i == nvars:
            yield ()
            return
        for e in range(left + 1):
            for rest in rec(i + 1, left - e):
                yield (e,) + rest
    return rec(0, m)


def nclass_contributions(d: Dataset, chamber: Chamber, n: int, *, op=None,
                         order: int | None = None) -> list[tuple[str, TruncatedSeries, float]]:
    """(name, renormalized class, integral of tangent genus times it) per component."""
    op = d.operator if op is None else OperatorKind(op)
    out = []
    for c in d.sorted_components():
        nc = renormalized_class(c, chamber, n, op=op, rank=d.rank, order=order)
        genus = tangent_genus(c, op, d.rank, ring=Floats(), order=order)
        out.append((c.name, nc, float(integrate_component(genus * nc, c).value)))
    return out


# -- ball averaging (slow cross-check) ------------------------------------------------------


def ball_average(f: Callable, rank: int, radius: float, samples_per_period: int = 1024,
                 shift: Sequence[float] | None = None) -> float:
    """Direct mean of ``F(X)`` over the box ``[-R, R]^k`` with ``u_j = exp(-i X_j / 2)``.

    Midpoint nodes; ``shift`` moves the box to ``X + i Q`` so that
    ``|u_j| = exp(Q_j / 2)``, the same torus as the numeric engine.
    """
    if rank == 0:
        return complex(f()).real
    period = 4 * np.pi  # common period of all u-monomials
    count = max(2, int(round(2 * radius / period * samples_per_period)))
    x = -radius + (np.arange(count) + 0.5) * (2 * radius / count)
    q = np.zeros(rank) if shift is None else np.asarray(shift, dtype=float)
    axes = []
    for j in range(rank):
        shape = [1] * rank
        shape[j] = count
        axes.append(np.exp(-0.5j * (x + 1j * q[j])).reshape(shape))
    vals = np.asarray(f(*axes), dtype=complex)
    return complex(np.broadcast_to(vals, (count,) * rank).mean()).real


def ball_average_sweep(f: Callable, rank: int, radii: Sequence[float], samples_per_period: int = 64):
    return [(r, ball_average(f, rank, r, samples_per_period)) for r in radii]


# -- the full computation -----------------------------------------------------------------


@dataclass
class ComponentResult:
    name: str
    exact: LaurentRational | None = None
    numeric: float | None = None
    numeric_imag: float | None = None
    numeric_error: float | None = None
    sup: float | None = None


@dataclass
class IndexReport:
    dataset: str
    operator: str
    engine: str
    rank: int
    chamber: tuple[Fraction, ...] | None
    nodes: int | None
    exact_index: Fraction | None = None
    numeric_index: float | None = None
    numeric_error: float | None = None
    per_component: list[ComponentResult] = field(default_factory=list)
    certificate: LaurentPoly | None = None
    surviving_denominator: LaurentPoly | None = None
    surviving_factors: list[tuple[LaurentPoly, int]] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def cancelled(self) -> bool:
        return self.surviving_denominator is None

    # -- serialization ------------------------------------------------------------

    def to_dict(self) -> dict:
        k = self.rank
        return {
            "dataset": self.dataset,
            "operator": self.operator,
            "engine": self.engine,
            "rank": k,
            "chamber": None if self.chamber is None else [format_fraction(x) for x in self.chamber],
            "nodes": self.nodes,
            "exact_index": None if self.exact_index is None else format_fraction(self.exact_index),
            "numeric_index": self.numeric_index,
            "numeric_error": self.numeric_error,
            "per_component": [
                {
                    "name": c.name,
                    "exact": None if c.exact is None else c.exact.to_json(),
                    "exact_text": None if c.exact is None else str(c.exact),
                    "numeric": c.numeric,
                    "numeric_imag": c.numeric_imag,
                    "numeric_error": c.numeric_error,
                    "sup": c.sup,
                }
                for c in self.per_component
            ],
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "certificate_text": None if self.certificate is None else str(self.certificate),
            "surviving_denominator": (None if self.surviving_denominator is None
                                      else self.surviving_denominator.to_json()),
            "surviving_denominator_text": (None if self.surviving_denominator is None
                                           else str(self.surviving_denominator)),
            "surviving_factors": [[b.to_json(), m] for b, m in self.surviving_factors],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "IndexReport":
        k = obj["rank"]

        def poly(v):
            return None if v is None else LaurentPoly.from_json(k, v)

        return cls(
            dataset=obj["dataset"], operator=obj["operator"], engine=obj["engine"], rank=k,
            chamber=None if obj["chamber"] is None else tuple(parse_fraction(x) for x in obj["chamber"]),
            nodes=obj["nodes"],
            exact_index=None if obj["exact_index"] is None else parse_fraction(obj["exact_index"]),
            numeric_index=obj["numeric_index"], numeric_error=obj["numeric_error"],
            per_component=[
                ComponentResult(
                    name=c["name"],
                    exact=None if c["exact"] is None else LaurentRational.from_json(k, c["exact"]),
                    numeric=c["numeric"], numeric_imag=c["numeric_imag"],
                    numeric_error=c["numeric_error"], sup=c["sup"])
                for c in obj["per_component"]
            ],
            certificate=poly(obj["certificate"]),
            surviving_denominator=poly(obj["surviving_denominator"]),
            surviving_factors=[(LaurentPoly.from_json(k, b), m) for b, m in obj["surviving_factors"]],
            warnings=list(obj.get("warnings", [])),
        )

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "IndexReport":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"dataset   {self.dataset}", f"operator  {self.operator}", f"engine    {self.engine}"]
        if self.chamber is not None:
            lines.append(f"chamber   Q = ({', '.join(format_fraction(x) for x in self.chamber)})"
                         + (f", N = {self.nodes}" if self.nodes else ""))
        if self.exact_index is not None:
            lines.append(f"exact     {self.exact_index}")
        if self.numeric_index is not None:
            lines.append(f"numeric   {self.numeric_index:.15g} +- {self.numeric_error:.2e}")
        if self.certificate is not None:
            lines.append(f"total     {self.certificate}")
        if self.surviving_denominator is not None:
            lines.append(f"NOT CANCELLED: surviving denominator {self.surviving_denominator}")
            for b, m in self.surviving_factors:
                lines.append(f"          factor ({b})^{m}")
        lines.append("components:")
        for c in self.per_component:
            bits = [f"  {c.name}:"]
            if c.exact is not None:
                bits.append(f"exact {c.exact}")
            if c.numeric is not None:
                bits.append(f"AV {c.numeric:.12g}")
            lines.append(" ".join(bits))
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines)


def index_compute(d: Dataset, engine: str = "both", chamber=None, nodes: int | None = None, *,
                  op=None, order: int | None = None) -> IndexReport:
    """Assemble, integrate and average; see :class:`IndexReport`.

    Raises :class:`DatasetError` for invalid data, :class:`ChamberError` for a
    chamber on a weight hyperplane (numeric engine) and
    :class:`SingularityNotCancelled` (carrying the report) when the exact sum
    keeps a pole.
    """
    if engine not in ("exact", "numeric", "both"):
        raise ValueError(f"unknown engine {engine!r}")
    op = d.operator if op is None else OperatorKind(op)
    problems = dataset_validate(d)
    if problems:
        raise DatasetError("; ".join(problems))
    comps = d.sorted_components()
    report = IndexReport(dataset=d.name or "<dataset>", operator=op.value, engine=engine, rank=d.rank,
                         chamber=None, nodes=None,
                         per_component=[ComponentResult(c.name) for c in comps])
    failure: SingularityNotCancelled | None = None

    if engine in ("numeric", "both"):
        ch = as_chamber(chamber, d)
        problems = chamber_validate(ch, d)
        if problems:
            raise ChamberError(problems)
        n = auto_nodes(d, ch) if nodes is None else int(nodes)
        report.chamber, report.nodes = ch.q, n
        avgs = numeric_contributions(d, ch, n, op=op, order=order)
        for res, avg in zip(report.per_component, avgs):
            res.numeric = float(avg.value.real)
            res.numeric_imag = float(avg.value.imag)
            res.numeric_error = avg.error
            res.sup = avg.sup
        report.numeric_index = float(sum(a.value.real for a in avgs))
        report.numeric_error = float(sum(a.error for a in avgs) + max(abs(a.value.imag) for a in avgs) if avgs else 0.0)
        if any(a.offset for a in avgs):
            report.warnings.append("quadrature nodes shifted by half a step to avoid a pole")

    if engine in ("exact", "both"):
        if report.chamber is None and chamber not in (None, "auto"):
            report.chamber = as_chamber(chamber, d).q
        exact = contributions(d, op=op, order=order)
        for res, con in zip(report.per_component, exact):
            res.exact = con.value
        if exact:
            try:
                poly = certify([c.value for c in exact], dataset_binomials(d))
                report.certificate = poly
                report.exact_index = poly.constant_term()
            except SingularityNotCancelled as exc:
                report.surviving_denominator = exc.denominator
                report.surviving_factors = list(exc.factors)
                exc.report = report
                failure = exc
        else:
            report.certificate = LaurentPoly.zero(d.rank)
            report.exact_index = Fraction(0)
    if failure is not None:
        raise failure
    return report
