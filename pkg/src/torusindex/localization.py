"""Fixed-point data for the deepest stratum and per-component localized integrands.

A :class:`FixedComponent` records one connected component of the torus-fixed
set: its dimension, how many tangent Chern roots it has, the weighted complex
lines making up its normal bundle, an optional auxiliary (twisting) bundle
and the intersection numbers needed to integrate over it.  Root symbols are
named by position: tangent roots ``t1 .. tr``, the root of the q-th normal
line ``n<q>`` and of the q-th auxiliary line ``a<q>`` (1-based, only for
lines declared with ``root: true``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Any, Mapping, Sequence

from .algebra import format_fraction, parse_fraction
from .characteristic import (
    OperatorKind,
    ahat_genus,
    aux_character,
    dirac_factor,
    euler_form,
    l_genus,
    sign_factor,
)
from .series import RationalFunctions, RootSymbol, TruncatedSeries


class DatasetError(ValueError):
    """Malformed dataset (schema or consistency)."""


@dataclass(frozen=True)
class NormalLine:
    weight: tuple[int, ...]
    root: bool = False


@dataclass(frozen=True)
class AuxLine:
    weight: tuple[int, ...]
    parity: int = 1
    root: bool = False


_FACTOR = re.compile(r"^([tna])(\d+)(?:\^(\d+))?$")


def parse_monomial(text: str) -> dict[str, int]:
    """``"t1^2*n1"`` -> ``{"t1": 2, "n1": 1}``; ``"1"`` or ``""`` is the empty monomial."""
    text = text.strip()
    if text in ("", "1"):
        return {}
    out: dict[str, int] = {}
    for piece in re.split(r"\s*\*\s*|\s+", text):
        m = _FACTOR.match(piece)
        if not m:
            raise DatasetError(f"bad monomial factor {piece!r} in {text!r}")
        name = m.group(1) + m.group(2)
        out[name] = out.get(name, 0) + int(m.group(3) or 1)
    return out


def format_monomial(powers: Mapping[str, int], order: Sequence[str]) -> str:
    parts = [n if powers[n] == 1 else f"{n}^{powers[n]}" for n in order if powers.get(n)]
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class FixedComponent:
    name: str
    dim: int
    tangent_roots: int
    normal_lines: tuple[NormalLine, ...] = ()
    aux_lines: tuple[AuxLine, ...] = ()
    sign: int = 1
    intersection: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "normal_lines", tuple(self.normal_lines))
        object.__setattr__(self, "aux_lines", tuple(self.aux_lines))
        names = [r.id for r in self.universe]
        canon: dict[str, Fraction] = {}
        for key, val in dict(self.intersection).items():
            powers = parse_monomial(key)
            unknown = set(powers) - set(names)
            if unknown:
                raise DatasetError(f"component {self.name}: unknown roots {sorted(unknown)} in {key!r}")
            canon[format_monomial(powers, names)] = Fraction(val)
        if self.dim == 0 and not canon:
            canon["1"] = Fraction(1)
        object.__setattr__(self, "intersection", canon)

    @property
    def half_dim(self) -> int:
        return self.dim // 2

    @property
    def tangent_symbols(self) -> tuple[RootSymbol, ...]:
        return tuple(RootSymbol(f"t{j + 1}", "tangent") for j in range(self.tangent_roots))

    @property
    def normal_symbols(self) -> tuple[RootSymbol | None, ...]:
        return tuple(RootSymbol(f"n{q + 1}", "normal") if line.root else None
                     for q, line in enumerate(self.normal_lines))

    @property
    def aux_symbols(self) -> tuple[RootSymbol | None, ...]:
        return tuple(RootSymbol(f"a{q + 1}", "auxiliary") if line.root else None
                     for q, line in enumerate(self.aux_lines))

    @property
    def universe(self) -> tuple[RootSymbol, ...]:
        return self.tangent_symbols + tuple(
            r for r in self.normal_symbols + self.aux_symbols if r is not None)

    def functional(self) -> dict[tuple[int, ...], Fraction]:
        """Intersection numbers keyed by exponent tuples over :attr:`universe`."""
        names = [r.id for r in self.universe]
        out = {}
        for key, val in self.intersection.items():
            powers = parse_monomial(key)
            out[tuple(powers.get(n, 0) for n in names)] = val
        return out

    def normal_weights(self) -> list[tuple[int, ...]]:
        return [line.weight for line in self.normal_lines]


@dataclass(frozen=True)
class Dataset:
    rank: int
    components: tuple[FixedComponent, ...]
    operator: OperatorKind = OperatorKind.DIRAC
    name: str = ""
    empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "operator", OperatorKind(self.operator))

    def with_operator(self, op) -> "Dataset":
        return replace(self, operator=OperatorKind(op))

    def normal_weights(self) -> list[tuple[int, ...]]:
        seen = []
        for c in self.components:
            for w in c.normal_weights():
                if w not in seen:
                    seen.append(w)
        return seen

    def sorted_components(self) -> list[FixedComponent]:
        return sorted(self.components, key=lambda c: c.name)


@dataclass
class Contribution:
    name: str
    value: Any


# -- assembly and integration ----------------------------------------------------


def _order(c: FixedComponent, order: int | None) -> int:
    m = c.half_dim if order is None else int(order)
    if m < c.half_dim:
        raise ValueError(f"truncation overflow: order {m} below half-dimension {c.half_dim} of {c.name}")
    return m


def normal_part(c: FixedComponent, op, rank: int, *, ring=None, order: int | None = None) -> TruncatedSeries:
    """Sign times normal factors times auxiliary character (no tangent genus)."""
    op = OperatorKind(op)
    ring = RationalFunctions(rank) if ring is None else ring
    m = _order(c, order)
    universe = c.universe
    out = TruncatedSeries.constant(ring, universe, m, ring.scalar(c.sign))
    if op is OperatorKind.EULER:
        return out
    factor = sign_factor if op is OperatorKind.SIGNATURE else dirac_factor
    for line, sym in zip(c.normal_lines, c.normal_symbols):
        out = out * factor(line.weight, sym, m, ring=ring, universe=universe)
    if op is OperatorKind.CUSTOM:
        lines = [(a.weight, a.parity, s) for a, s in zip(c.aux_lines, c.aux_symbols)]
        out = out * aux_character(lines, m, ring=ring, universe=universe, rank=rank)
    return out


def tangent_genus(c: FixedComponent, op, rank: int, *, ring=None, order: int | None = None) -> TruncatedSeries:
    op = OperatorKind(op)
    ring = RationalFunctions(rank) if ring is None else ring
    m = _order(c, order)
    build = {OperatorKind.DIRAC: ahat_genus, OperatorKind.CUSTOM: ahat_genus,
             OperatorKind.SIGNATURE: l_genus, OperatorKind.EULER: euler_form}[op]
    return build(c.tangent_symbols, m, ring=ring, universe=c.universe)


def assemble_integrand(c: FixedComponent, op, rank: int, *, ring=None, order: int | None = None) -> TruncatedSeries:
    for line in c.normal_lines:
        if len(line.weight) != rank:
            raise ValueError(f"{c.name}: weight {line.weight} has length != rank {rank}")
    ring = RationalFunctions(rank) if ring is None else ring
    return (tangent_genus(c, op, rank, ring=ring, order=order)
            * normal_part(c, op, rank, ring=ring, order=order))


def integrate_component(s: TruncatedSeries, c: FixedComponent) -> Contribution:
    """Apply the intersection functional to the degree ``dim/2`` part of ``s``."""
    if s.roots != c.universe:
        raise ValueError("series is not over this component's roots")
    functional = c.functional()
    total = s.ring.scalar(0)
    for mono, coeff in s.degree_part(c.half_dim).items():
        if mono not in functional:
            names = [r.id for r in c.universe]
            label = format_monomial(dict(zip(names, mono)), names)
            raise KeyError(f"{c.name}: monomial {label} missing from the intersection functional")
        val = functional[mono]
        if val:
            total = total + coeff * s.ring.scalar(val)
    return Contribution(c.name, total)


def contributions(d: Dataset, *, op=None, ring=None, order: int | None = None) -> list[Contribution]:
    op = d.operator if op is None else OperatorKind(op)
    return [integrate_component(assemble_integrand(c, op, d.rank, ring=ring, order=order), c)
            for c in d.sorted_components()]


# -- validation ----------------------------------------------------------------------


def _top_monomials(nvars: int, degree: int):
    for combo in combinations_with_replacement(range(nvars), degree):
        mono = [0] * nvars
        for i in combo:
            mono[i] += 1
        yield tuple(mono)


def dataset_validate(d: Dataset) -> list[str]:
    """Human-readable diagnostics; an empty list means the dataset is usable."""
    out: list[str] = []
    if d.rank < 0:
        out.append(f"rank {d.rank} is negative")
    if not d.components and not d.empty:
        out.append("no components and W_max not declared empty")
    names = [c.name for c in d.components]
    for n in sorted({n for n in names if names.count(n) > 1}):
        out.append(f"duplicate component name {n!r}")
    for c in d.components:
        tag = f"component {c.name}"
        if c.dim < 0 or c.dim % 2:
            out.append(f"{tag}: dimension {c.dim} is not even and nonnegative")
            continue
        if c.tangent_roots != c.half_dim:
            out.append(f"{tag}: {c.tangent_roots} tangent roots for dimension {c.dim}")
        if c.sign not in (1, -1):
            out.append(f"{tag}: sign {c.sign} is not +1/-1")
        for q, line in enumerate(c.normal_lines, 1):
            if len(line.weight) != d.rank:
                out.append(f"{tag}: normal line {q} weight {list(line.weight)} has length != rank {d.rank}")
            elif not any(line.weight):
                out.append(f"{tag}: normal line {q} has weight 0, which is in n^perp for all Q")
        for q, line in enumerate(c.aux_lines, 1):
            if len(line.weight) != d.rank:
                out.append(f"{tag}: aux line {q} weight {list(line.weight)} has length != rank {d.rank}")
            if line.parity not in (1, -1):
                out.append(f"{tag}: aux line {q} parity {line.parity} is not +1/-1")
        if d.operator is OperatorKind.CUSTOM and not c.aux_lines:
            out.append(f"{tag}: custom operator without auxiliary lines (character is 0)")
        universe = [r.id for r in c.universe]
        functional = c.functional()
        for mono in functional:
            if sum(mono) != c.half_dim:
                label = format_monomial(dict(zip(universe, mono)), universe)
                out.append(f"{tag}: functional entry {label} is not of degree {c.half_dim}")
        if c.half_dim:
            for mono in _top_monomials(len(universe), c.half_dim):
                if mono not in functional:
                    label = format_monomial(dict(zip(universe, mono)), universe)
                    out.append(f"{tag}: intersection functional missing monomial {label}")
    return out


# -- JSON -----------------------------------------------------------------------------


def _int_vector(value, what: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in value):
        raise DatasetError(f"{what} must be a list of integers, got {value!r}")
    return tuple(value)


def _require(obj: Mapping, key: str, what: str):
    if key not in obj:
        raise DatasetError(f"{what}: missing field {key!r}")
    return obj[key]


def component_from_dict(obj: Mapping) -> FixedComponent:
    if not isinstance(obj, Mapping):
        raise DatasetError("component must be an object")
    name = str(_require(obj, "name", "component"))
    what = f"component {name}"
    normals = []
    for line in obj.get("normal_lines", []):
        normals.append(NormalLine(_int_vector(_require(line, "weight", what), f"{what} weight"),
                                  bool(line.get("root", False))))
    auxes = []
    for line in obj.get("aux_lines", []):
        auxes.append(AuxLine(_int_vector(_require(line, "weight", what), f"{what} weight"),
                             int(line.get("parity", 1)), bool(line.get("root", False))))
    try:
        inter = {k: parse_fraction(v) for k, v in dict(obj.get("intersection", {})).items()}
    except (ValueError, ZeroDivisionError) as exc:
        raise DatasetError(f"{what}: bad intersection number ({exc})") from exc
    dim = _require(obj, "dim", what)
    troots = obj.get("tangent_roots", dim // 2 if isinstance(dim, int) else 0)
    if not isinstance(dim, int) or not isinstance(troots, int):
        raise DatasetError(f"{what}: dim and tangent_roots must be integers")
    return FixedComponent(name=name, dim=dim, tangent_roots=troots, normal_lines=tuple(normals),
                          aux_lines=tuple(auxes), sign=int(obj.get("sign", 1)), intersection=inter)


def dataset_from_dict(obj: Mapping) -> Dataset:
    if not isinstance(obj, Mapping):
        raise DatasetError("dataset must be a JSON object")
    rank = _require(obj, "rank", "dataset")
    if not isinstance(rank, int):
        raise DatasetError("rank must be an integer")
    try:
        op = OperatorKind(obj.get("operator", "dirac"))
    except ValueError as exc:
        raise DatasetError(str(exc)) from exc
    comps = _require(obj, "components", "dataset")
    if not isinstance(comps, list):
        raise DatasetError("components must be a list")
    return Dataset(rank=rank, components=tuple(component_from_dict(c) for c in comps), operator=op,
                   name=str(obj.get("name", "")), empty=bool(obj.get("empty", False)))


def dataset_to_dict(d: Dataset) -> dict:
    out: dict[str, Any] = {"rank": d.rank, "operator": d.operator.value}
    if d.name:
        out["name"] = d.name
    if d.empty:
        out["empty"] = True
    out["components"] = [
        {
            "name": c.name,
            "dim": c.dim,
            "tangent_roots": c.tangent_roots,
            "normal_lines": [{"weight": list(l.weight), "root": l.root} for l in c.normal_lines],
            "aux_lines": [{"weight": list(a.weight), "parity": a.parity, "root": a.root} for a in c.aux_lines],
            "sign": c.sign,
            "intersection": {k: format_fraction(v) for k, v in c.intersection.items()},
        }
        for c in d.components
    ]
    return out


def load_dataset(path) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from exc
    return dataset_from_dict(obj)


def dump_dataset(d: Dataset, path=None) -> str:
    text = json.dumps(dataset_to_dict(d), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


# -- products and restriction ----------------------------------------------------------


def _rename(powers: Mapping[str, int], shifts: Mapping[str, int]) -> dict[str, int]:
    out = {}
    for name, p in powers.items():
        out[name[0] + str(int(name[1:]) + shifts[name[0]])] = p
    return out


def product(a: Dataset, b: Dataset, name: str | None = None) -> Dataset:
    """Cartesian product; the torus is the product torus of rank ``a.rank + b.rank``."""
    comps = []
    for ca in a.sorted_components():
        for cb in b.sorted_components():
            if ca.aux_lines and cb.aux_lines:
                raise DatasetError("product of two twisted components is not supported")
            pad_a = lambda w: tuple(w) + (0,) * b.rank
            pad_b = lambda w: (0,) * a.rank + tuple(w)
            normals = tuple(NormalLine(pad_a(l.weight), l.root) for l in ca.normal_lines) + tuple(
                NormalLine(pad_b(l.weight), l.root) for l in cb.normal_lines)
            auxes = tuple(AuxLine(pad_a(x.weight), x.parity, x.root) for x in ca.aux_lines) + tuple(
                AuxLine(pad_b(x.weight), x.parity, x.root) for x in cb.aux_lines)
            shifts = {"t": ca.tangent_roots, "n": len(ca.normal_lines), "a": len(ca.aux_lines)}
            inter = {}
            for ka, va in ca.intersection.items():
                for kb, vb in cb.intersection.items():
                    powers = dict(parse_monomial(ka))
                    for n, p in _rename(parse_monomial(kb), shifts).items():
                        powers[n] = powers.get(n, 0) + p
                    inter[format_monomial(powers, sorted(powers))] = va * vb
            comps.append(FixedComponent(
                name=f"{ca.name}*{cb.name}", dim=ca.dim + cb.dim,
                tangent_roots=ca.tangent_roots + cb.tangent_roots, normal_lines=normals,
                aux_lines=auxes, sign=ca.sign * cb.sign, intersection=inter))
    return Dataset(rank=a.rank + b.rank, components=tuple(comps), operator=a.operator,
                   name=name or f"{a.name}x{b.name}")


def restrict(d: Dataset, matrix: Sequence[Sequence[int]], name: str | None = None) -> Dataset:
    """Restrict to a subtorus; ``matrix[i][j]`` maps old coordinate i to new coordinate j."""
    if len(matrix) != d.rank:
        raise DatasetError("restriction matrix needs one row per torus coordinate")
    new_rank = len(matrix[0]) if matrix else 0

    def image(w):
        return tuple(sum(w[i] * matrix[i][j] for i in range(d.rank)) for j in range(new_rank))

    comps = []
    for c in d.components:
        comps.append(replace(
            c,
            normal_lines=tuple(NormalLine(image(l.weight), l.root) for l in c.normal_lines),
            aux_lines=tuple(AuxLine(image(x.weight), x.parity, x.root) for x in c.aux_lines)))
    out = Dataset(rank=new_rank, components=tuple(comps), operator=d.operator, name=name or d.name)
    for c in out.components:
        for line in c.normal_lines:
            if not any(line.weight):
                raise DatasetError(f"restriction kills a normal weight on {c.name}; fixed set changes")
    return out
