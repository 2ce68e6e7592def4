"""Built-in fixed-point datasets with classically known answers.

Weights follow the tangent-character convention: at the fixed point ``p_i``
of a linear action on CP^n with exponents ``a_0 .. a_n`` the tangent lines
carry weights ``a_j - a_i``.  Auxiliary lines are entered with the opposite
sign (a line whose fiber character matches a normal line of weight ``n``
appears with weight ``-n``), which is what makes twisted sums cancel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .characteristic import OperatorKind
from .localization import (
    AuxLine,
    Dataset,
    FixedComponent,
    NormalLine,
    product,
    restrict,
)


@dataclass(frozen=True)
class BuiltinInfo:
    name: str
    build: Callable[[], Dataset]
    description: str
    spin: bool = False
    geometric: bool = True
    expected: dict = field(default_factory=dict)


def _point(name: str, weights, sign: int = 1, aux=()) -> FixedComponent:
    return FixedComponent(name=name, dim=0, tangent_roots=0,
                          normal_lines=tuple(NormalLine(tuple(w)) for w in weights),
                          aux_lines=tuple(aux), sign=sign)


def sphere(m: int = 1) -> Dataset:
    """S^(2m) in C^m + R with the standard T^m action: two poles."""
    e = [tuple(1 if i == j else 0 for i in range(m)) for j in range(m)]
    south = [tuple(-a for a in e[0])] + e[1:]
    return Dataset(rank=m, components=(_point("north", e), _point("south", south)),
                   operator=OperatorKind.DIRAC, name=f"s{2 * m}-rotation")


def projective(n: int, exponents=None, name: str | None = None) -> Dataset:
    """CP^n with a linear action; default exponents give the T^n action."""
    if exponents is None:
        exponents = [tuple(0 for _ in range(n))] + [
            tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
        rank = n
    else:
        exponents = [tuple(a) if isinstance(a, (tuple, list)) else (a,) for a in exponents]
        rank = len(exponents[0])
    comps = []
    for i, ai in enumerate(exponents):
        weights = [tuple(x - y for x, y in zip(aj, ai)) for j, aj in enumerate(exponents) if j != i]
        if any(not any(w) for w in weights):
            raise ValueError("exponents must be pairwise distinct for isolated fixed points")
        comps.append(_point(f"p{i}", weights))
    return Dataset(rank=rank, components=tuple(comps), operator=OperatorKind.DIRAC,
                   name=name or f"cp{n}-t{n}")


def example9() -> Dataset:
    """A lone fixed point with both weights 1: chamber-free averaging diverges."""
    return Dataset(rank=1, components=(_point("z1", [(1,), (1,)]),),
                   operator=OperatorKind.SIGNATURE, name="example9-n11")


def cp2_s1_011() -> Dataset:
    """CP^2 with exponents (0, 1, 1): the weight-(1,1) point plus a fixed line.

    The line {z0 = 0} has tangent bundle O(2) and normal bundle O(1) of weight -1.
    """
    line = FixedComponent(name="line", dim=2, tangent_roots=1,
                          normal_lines=(NormalLine((-1,), root=True),),
                          intersection={"t1": 2, "n1": 1})
    return Dataset(rank=1, components=(_point("p0", [(1,), (1,)]), line),
                   operator=OperatorKind.SIGNATURE, name="cp2-s1-011")


def cp3_s1_0011(twist: bool = False) -> Dataset:
    """CP^3 with exponents (0, 0, 1, 1): two fixed lines with normal O(1)+O(1).

    With ``twist`` the Dirac operator is coupled to O(2) with the lift whose
    invariant index is 1 (Dirac tensor O(2) is the Dolbeault complex of CP^3).
    """
    comps = []
    for name, w, aux_w in (("lineA", 1, -1), ("lineB", -1, 1)):
        inter = {"t1": 2, "n1": 1, "n2": 1}
        aux = ()
        if twist:
            aux = (AuxLine((aux_w,), 1, root=True),)
            inter["a1"] = 2
        comps.append(FixedComponent(
            name=name, dim=2, tangent_roots=1,
            normal_lines=(NormalLine((w,), True), NormalLine((w,), True)),
            aux_lines=aux, intersection=inter))
    return Dataset(rank=1, components=tuple(comps),
                   operator=OperatorKind.CUSTOM if twist else OperatorKind.DIRAC,
                   name="cp3-s1-0011-o2" if twist else "cp3-s1-0011")


def s2_twisted() -> Dataset:
    """S^2 rotated at speed 2, Dirac coupled to O(1) lifted with invariant index 1."""
    return Dataset(rank=1, components=(
        _point("north", [(2,)], aux=(AuxLine((-1,), 1),)),
        _point("south", [(-2,)], aux=(AuxLine((1,), 1),)),
    ), operator=OperatorKind.CUSTOM, name="s2-twisted")


def k3() -> Dataset:
    """Rank-0 (no torus) K3 surface: p1 = -48, c2 = 24."""
    comp = FixedComponent(name="K3", dim=4, tangent_roots=2,
                          intersection={"t1^2": -24, "t2^2": -24, "t1*t2": 24})
    return Dataset(rank=0, components=(comp,), operator=OperatorKind.DIRAC, name="k3")


def cp1xcp1() -> Dataset:
    return product(sphere(1), sphere(1), name="cp1xcp1")


def cp1xcp1_diag() -> Dataset:
    return restrict(cp1xcp1(), [[1], [1]], name="cp1xcp1-diag")


def example9_augmented() -> Dataset:
    """CP^2(0,1,1) times the rotated S^2: contains the weight-(1,1) point, rank 2."""
    d = product(cp2_s1_011(), sphere(1), name="example9-augmented")
    return d.with_operator(OperatorKind.SIGNATURE)


_D, _S, _E, _C = "dirac", "signature", "euler", "custom"

BUILTINS: dict[str, BuiltinInfo] = {
    info.name: info
    for info in [
        BuiltinInfo("s2-rotation", lambda: sphere(1), "S^2, rotation, two poles",
                    spin=True, expected={_D: 0, _S: 0, _E: 2}),
        BuiltinInfo("s4-rotation", lambda: sphere(2), "S^4, T^2 action, two poles",
                    spin=True, expected={_D: 0, _S: 0, _E: 2}),
        BuiltinInfo("s6-rotation", lambda: sphere(3), "S^6, T^3 action, two poles",
                    spin=True, expected={_D: 0, _E: 2}),
        BuiltinInfo("cp1-s1", lambda: projective(1, [0, 1], "cp1-s1"), "CP^1 with S^1 action",
                    spin=True, expected={_D: 0, _S: 0, _E: 2}),
        BuiltinInfo("cp2-t2", lambda: projective(2).with_operator(_S), "CP^2, T^2 action, 3 points",
                    expected={_S: 1, _E: 3}),
        BuiltinInfo("cp2-s1", lambda: projective(2, [0, 1, 2], "cp2-s1").with_operator(_S),
                    "CP^2, S^1 exponents (0,1,2)", expected={_S: 1, _E: 3}),
        BuiltinInfo("cp3-t3", lambda: projective(3), "CP^3, T^3 action, 4 points",
                    spin=True, expected={_D: 0, _S: 0, _E: 4}),
        BuiltinInfo("cp3-s1", lambda: projective(3, [0, 1, 2, 3], "cp3-s1"),
                    "CP^3, S^1 exponents (0,1,2,3)", spin=True, expected={_D: 0, _E: 4}),
        BuiltinInfo("cp4-s1", lambda: projective(4, [0, 1, 2, 3, 4], "cp4-s1").with_operator(_S),
                    "CP^4, S^1 exponents (0,..,4)", expected={_S: 1, _E: 5}),
        BuiltinInfo("cp1xcp1", cp1xcp1, "S^2 x S^2, T^2 action",
                    spin=True, expected={_D: 0, _S: 0, _E: 4}),
        BuiltinInfo("cp1xcp1-diag", cp1xcp1_diag, "S^2 x S^2, diagonal rotation",
                    spin=True, expected={_D: 0, _S: 0, _E: 4}),
        BuiltinInfo("cp2-s1-011", cp2_s1_011, "CP^2, S^1 exponents (0,1,1): point + fixed line",
                    expected={_S: 1, _E: 3}),
        BuiltinInfo("cp3-s1-0011", lambda: cp3_s1_0011(False), "CP^3, S^1 exponents (0,0,1,1): two lines",
                    spin=True, expected={_D: 0, _S: 0, _E: 4}),
        BuiltinInfo("cp3-s1-0011-o2", lambda: cp3_s1_0011(True), "CP^3 (0,0,1,1) Dirac twisted by O(2)",
                    expected={_C: 1}),
        BuiltinInfo("s2-twisted", s2_twisted, "S^2 at speed 2, Dirac twisted by O(1)",
                    expected={_C: 1}),
        BuiltinInfo("example9-n11", example9, "single point, weights (1,1): divergent alone",
                    geometric=False),
        BuiltinInfo("example9-augmented", example9_augmented,
                    "CP^2(0,1,1) x S^2 rotation, rank 2", expected={_S: 0, _E: 6}),
        BuiltinInfo("k3", k3, "K3 surface, no torus (rank 0)",
                    spin=True, expected={_D: 2, _S: -16, _E: 24}),
    ]
}


def builtin_datasets(name: str) -> Dataset:
    try:
        info = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin dataset {name!r}; known: {', '.join(sorted(BUILTINS))}") from None
    return info.build()
