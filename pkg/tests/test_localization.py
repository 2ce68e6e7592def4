import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusindex.algebra import LaurentPoly, LaurentRational
from torusindex.characteristic import OperatorKind
from torusindex.datasets import BUILTINS, builtin_datasets, projective
from torusindex.localization import (
    Dataset,
    DatasetError,
    FixedComponent,
    NormalLine,
    assemble_integrand,
    contributions,
    dataset_from_dict,
    dataset_to_dict,
    dataset_validate,
    dump_dataset,
    format_monomial,
    integrate_component,
    load_dataset,
    parse_monomial,
    product,
    restrict,
)
from torusindex.series import RationalFunctions, TruncatedSeries

U = LaurentPoly.variable(1, 0)
R1 = RationalFunctions(1)


def point(weights, sign=1, aux=()):
    return FixedComponent("p", 0, 0, tuple(NormalLine(tuple(w)) for w in weights), tuple(aux), sign)


def test_monomial_names():
    assert parse_monomial("t1^2*n1") == {"t1": 2, "n1": 1}
    assert parse_monomial("t1*t1") == {"t1": 2}
    assert parse_monomial("1") == {}
    assert format_monomial({"t1": 2, "n1": 1}, ["t1", "n1"]) == "t1^2*n1"
    with pytest.raises(ValueError):
        parse_monomial("t1^x")


def test_point_integrands():
    dirac = assemble_integrand(point([(1,)]), OperatorKind.DIRAC, 1)
    assert dirac.constant_term() == LaurentRational(LaurentPoly.constant(1), U ** -1 - U)
    euler = assemble_integrand(point([(1,), (3,)]), OperatorKind.EULER, 1)
    assert euler.constant_term() == LaurentRational.constant(1, 1)
    sig = assemble_integrand(point([(1,), (1,)]), OperatorKind.SIGNATURE, 1)
    f = LaurentRational(U ** -1 + U, U ** -1 - U)
    # at u = exp(-i theta/2) this is -cot(theta/2)^2
    assert sig.constant_term() == f * f
    flipped = assemble_integrand(point([(1,), (1,)], sign=-1), OperatorKind.SIGNATURE, 1)
    assert flipped.constant_term() == -(f * f)


def test_integrate_component_examples():
    p = point([(1,)])
    s = assemble_integrand(p, OperatorKind.DIRAC, 1)
    assert integrate_component(s, p).value == s.constant_term()
    line = FixedComponent("Z", 2, 1, intersection={"t1": 1})
    a, b = LaurentRational.constant(1, 5), LaurentRational.constant(1, 7)
    s = TruncatedSeries(R1, line.universe, 1, {(0,): a, (1,): b})
    assert integrate_component(s, line).value == b
    cp1 = FixedComponent("Z", 2, 1, intersection={"t1": 2})
    s = TruncatedSeries(R1, cp1.universe, 1, {(1,): LaurentRational.constant(1, 1)})
    assert integrate_component(s, cp1).value == LaurentRational.constant(1, 2)


def test_missing_monomial_is_an_error():
    line = FixedComponent("Z", 2, 1, normal_lines=(NormalLine((1,), True),), intersection={"t1": 1})
    s = assemble_integrand(line, OperatorKind.DIRAC, 1)
    with pytest.raises(KeyError, match="n1"):
        integrate_component(s, line)


def test_validation_diagnostics():
    assert dataset_validate(builtin_datasets("s2-rotation")) == []
    bad = Dataset(1, (point([(0,)]),))
    assert any("n^perp" in m for m in dataset_validate(bad))
    empty_fn = Dataset(1, (FixedComponent("Z", 2, 1, (NormalLine((1,)),)),))
    assert any("missing monomial t1" in m for m in dataset_validate(empty_fn))
    odd = Dataset(1, (FixedComponent("Z", 3, 1),))
    assert any("not even" in m for m in dataset_validate(odd))
    assert dataset_validate(Dataset(1, ())) != []
    assert dataset_validate(Dataset(1, (), empty=True)) == []
    dup = Dataset(1, (point([(1,)]), point([(-1,)])))
    assert any("duplicate" in m for m in dataset_validate(dup))
    custom = Dataset(1, (point([(1,)]),), operator=OperatorKind.CUSTOM)
    assert any("custom" in m for m in dataset_validate(custom))


def test_builtin_shapes():
    s2 = builtin_datasets("s2-rotation")
    assert len(s2.components) == 2 and all(c.dim == 0 for c in s2.components)
    assert sorted(w for c in s2.components for w in c.normal_weights()) == [(-1,), (1,)]
    cp2 = builtin_datasets("cp2-t2")
    pairs = {frozenset(c.normal_weights()) for c in cp2.components}
    assert pairs == {frozenset({(1, 0), (0, 1)}), frozenset({(-1, 0), (-1, 1)}), frozenset({(0, -1), (1, -1)})}
    e9 = builtin_datasets("example9-n11")
    assert [c.normal_weights() for c in e9.components] == [[(1,), (1,)]]
    with pytest.raises(KeyError, match="known"):
        builtin_datasets("nope")
    for name in BUILTINS:
        assert dataset_validate(builtin_datasets(name)) == [], name


def test_json_round_trip(tmp_path):
    for name in BUILTINS:
        d = builtin_datasets(name)
        again = dataset_from_dict(json.loads(dump_dataset(d)))
        assert dataset_to_dict(again) == dataset_to_dict(d)
    path = tmp_path / "k3.json"
    dump_dataset(builtin_datasets("k3"), path)
    assert dataset_to_dict(load_dataset(path)) == dataset_to_dict(builtin_datasets("k3"))


def test_load_errors(tmp_path):
    with pytest.raises(DatasetError):
        load_dataset(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DatasetError):
        load_dataset(bad)
    with pytest.raises(DatasetError, match="rank"):
        dataset_from_dict({"components": []})
    with pytest.raises(DatasetError, match="weight"):
        dataset_from_dict({"rank": 1, "components": [{"name": "p", "dim": 0, "normal_lines": [{"weight": [0.5]}]}]})
    with pytest.raises(DatasetError):
        dataset_from_dict({"rank": 1, "operator": "spinc", "components": []})


def test_product_and_restriction():
    s2 = builtin_datasets("s2-rotation")
    pr = product(s2, s2)
    assert pr.rank == 2 and len(pr.components) == 4
    assert all(len(w) == 2 for c in pr.components for w in c.normal_weights())
    diag = restrict(pr, [[1], [1]])
    assert diag.rank == 1
    with pytest.raises(ValueError):
        # the weight (1, -1) restricts to 0
        restrict(builtin_datasets("cp2-t2"), [[1], [1]])


def _invert(f: LaurentRational) -> LaurentRational:
    return f.invert_variables()


def test_point_contributions_have_predicted_parity():
    for name in BUILTINS:
        d = builtin_datasets(name)
        if d.rank != 1:
            continue
        for op in (OperatorKind.DIRAC, OperatorKind.SIGNATURE, OperatorKind.EULER):
            for c, con in zip(d.sorted_components(), contributions(d, op=op)):
                if c.dim or c.aux_lines:
                    continue
                parity = 1 if op is OperatorKind.EULER else (-1) ** len(c.normal_lines)
                assert _invert(con.value) == con.value * parity, (name, op, c.name)


def test_signature_over_dirac_is_numerator():
    # F_sign = F_dirac * (u^-w + u^w) at x = 0
    p = point([(2,)])
    sig = assemble_integrand(p, OperatorKind.SIGNATURE, 1).constant_term()
    dir_ = assemble_integrand(p, OperatorKind.DIRAC, 1).constant_term()
    assert sig == dir_ * LaurentRational(U ** -2 + U ** 2)


@settings(max_examples=30, deadline=None)
@given(st.fractions(-3, 3, max_denominator=5), st.fractions(-3, 3, max_denominator=5))
def test_integration_is_linear(a, b):
    c = builtin_datasets("cp2-s1-011").sorted_components()[0]
    s = assemble_integrand(c, OperatorKind.SIGNATURE, 1)
    t = assemble_integrand(c, OperatorKind.DIRAC, 1)
    lhs = integrate_component(s.scale(R1.scalar(a)) + t.scale(R1.scalar(b)), c).value
    rhs = integrate_component(s, c).value * a + integrate_component(t, c).value * b
    assert lhs == rhs


def test_projective_rejects_repeated_exponents():
    with pytest.raises(ValueError):
        projective(2, [0, 1, 1])
