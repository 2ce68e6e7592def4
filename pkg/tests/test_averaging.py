from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusindex.algebra import LaurentPoly, LaurentRational
from torusindex.averaging import (
    Chamber,
    ChamberError,
    IndexReport,
    SingularityNotCancelled,
    auto_nodes,
    av_exact,
    av_numeric,
    ball_average,
    chamber_validate,
    dataset_binomials,
    default_chamber,
    index_compute,
    nclass_contributions,
    random_chamber,
    renormalized_class,
)
from torusindex.characteristic import OperatorKind
from torusindex.datasets import builtin_datasets
from torusindex.localization import AuxLine, Dataset, FixedComponent, NormalLine, contributions

U = LaurentPoly.variable(1, 0)
ONE = LaurentPoly.constant(1, 1)


def test_av_exact_examples():
    assert av_exact([LaurentRational(ONE, U ** -1 - U), LaurentRational(ONE, U - U ** -1)]) == 0
    assert av_exact([LaurentRational(3 + 2 * U - 2 * U ** -1)]) == 3
    cot2 = -LaurentRational(U ** -1 + U, U ** -1 - U) ** 2
    with pytest.raises(SingularityNotCancelled) as info:
        av_exact([cot2])
    from torusindex.algebra import exact_quotient

    assert exact_quotient(info.value.denominator, (U ** -1 - U) ** 2) is not None
    assert av_exact([]) == 0


def test_av_exact_linearity():
    d = builtin_datasets("cp2-s1-011").with_operator(OperatorKind.SIGNATURE)
    values = [c.value for c in contributions(d)]
    extra = [LaurentRational(2 - U ** 3), LaurentRational(ONE, U ** -1 - U), LaurentRational(ONE, U - U ** -1)]
    assert av_exact(values + extra) == av_exact(values) + av_exact(extra)


def test_av_numeric_chamber_dependence_of_one_term():
    def f(u):
        z = u * u
        return (1 + z) / (1 - z)

    inside = av_numeric(f, Chamber((Fraction(-1, 2),)), 256)
    outside = av_numeric(f, Chamber((Fraction(1, 2),)), 256)
    assert abs(inside.value - 1) < 1e-12 and abs(outside.value + 1) < 1e-12
    assert inside.error < 1e-10

    def pair(u):
        return f(u) + (1 + u ** -2) / (1 - u ** -2)

    for q in ("1/3", "-2", "5"):
        assert abs(av_numeric(pair, Chamber((Fraction(q),)), 256).value) < 1e-12


def test_av_numeric_multivariate_constant_term():
    def f(u1, u2):
        return 3 + u1 * u2 ** -1 + 2 * u2 ** 3 + 1 / (1 - u1 ** 2 * u2)

    ch = Chamber((Fraction(-1, 3), Fraction(-1, 5)))
    assert abs(av_numeric(f, ch, 128).value - 4) < 1e-12


def test_av_numeric_rejects_bad_node_count():
    with pytest.raises(ValueError):
        av_numeric(lambda u: u, Chamber((Fraction(1),)), 100)


def test_av_numeric_shifts_nodes_off_a_pole():
    # pole of 1/(u - 1) sits exactly on a node of the unshifted unit circle
    with pytest.warns(RuntimeWarning, match="half a step"):
        out = av_numeric(lambda u: u / (u - 1) - 1 / (u - 1), Chamber((Fraction(0),)), 64)
    assert out.offset and abs(out.value - 1) < 1e-12


def test_chamber_validate_examples():
    w = [(1,), (2,)]
    assert chamber_validate((Fraction(3, 10),), w) == []
    assert len(chamber_validate((0,), w)) == 2
    assert chamber_validate((1, 1), [(1, -1)]) != []
    assert chamber_validate((1, 2), [(1, -1)]) == []


def test_default_chamber_rule():
    assert default_chamber(builtin_datasets("s2-rotation")).q == (Fraction(1, 7),)
    assert default_chamber(builtin_datasets("cp2-t2")).q == (Fraction(1, 7), Fraction(3, 7))
    # (1,7)/7 style collisions: weights making (2j+1)/7 invalid force a perturbation
    comp = FixedComponent("p", 0, 0, (NormalLine((3, -1)),))
    d = Dataset(2, (comp,))
    q = default_chamber(d)
    assert q.q == (Fraction(1, 7) + Fraction(1, 101), Fraction(3, 7))
    assert chamber_validate(q, d) == []


def test_random_chambers_are_valid_and_seeded():
    d = builtin_datasets("cp3-t3")
    a = random_chamber(d, np.random.default_rng(0))
    b = random_chamber(d, np.random.default_rng(0))
    assert a == b and chamber_validate(a, d) == [] and a.margin(d.normal_weights()) >= 0.5


def test_index_compute_examples():
    r = index_compute(builtin_datasets("s2-rotation"), "both", op="dirac")
    assert r.exact_index == 0 and abs(r.numeric_index) < 1e-12 and r.cancelled
    assert index_compute(builtin_datasets("cp2-t2"), "exact", op="euler").exact_index == 3
    r = index_compute(builtin_datasets("cp2-s1"), "numeric", op="signature", nodes=4096)
    assert abs(r.numeric_index - 1) < 1e-9


def test_index_compute_errors():
    d = builtin_datasets("example9-n11")
    with pytest.raises(SingularityNotCancelled) as info:
        index_compute(d, "both")
    report = info.value.report
    assert report is not None and not report.cancelled and report.surviving_factors
    assert report.numeric_index is not None
    with pytest.raises(ChamberError):
        index_compute(d, "numeric", chamber=(0,))
    with pytest.raises(ChamberError):
        index_compute(d, "numeric", chamber=(1, 2))
    with pytest.raises(ValueError):
        index_compute(d, "fast")


def test_multivariate_exact_path():
    r = index_compute(builtin_datasets("example9-augmented"), "exact", op="euler")
    assert r.exact_index == 6
    assert len(dataset_binomials(builtin_datasets("cp2-t2"))) == 3


def test_report_round_trip():
    for name, op in (("cp2-s1-011", "signature"), ("cp1xcp1", "dirac"), ("k3", "signature")):
        r = index_compute(builtin_datasets(name), "both", op=op)
        again = IndexReport.from_json(r.to_json())
        assert again == r
        assert again.to_dict() == r.to_dict()
    with pytest.raises(SingularityNotCancelled) as info:
        index_compute(builtin_datasets("example9-n11"), "exact")
    r = info.value.report
    assert IndexReport.from_json(r.to_json()) == r
    assert "NOT CANCELLED" in r.to_text()


def test_auto_nodes_budget():
    assert auto_nodes(builtin_datasets("k3"), Chamber(())) == 1
    d = builtin_datasets("s2-rotation")
    assert auto_nodes(d, Chamber((Fraction(1, 7),))) >= 512
    assert auto_nodes(d, Chamber((Fraction(5),))) == 64


def test_renormalized_class():
    bare = FixedComponent("Z", 2, 1, aux_lines=(AuxLine((0,), 1),), intersection={"t1": 1})
    nc = renormalized_class(bare, Chamber((Fraction(1, 3),)), 64, op=OperatorKind.CUSTOM)
    assert nc.terms == {(0,): pytest.approx(1.0)}
    d = builtin_datasets("example9-n11")
    values = [nclass_contributions(d, Chamber((Fraction(q),)), 256)[0][2] for q in ("3/10", "3/5")]
    assert all(np.isfinite(values))
    s2 = builtin_datasets("s2-rotation")
    for q in ("1/7", "-2/3"):
        total = sum(v for _, _, v in nclass_contributions(s2, Chamber((Fraction(q),)), 1024))
        assert abs(total) < 1e-9
    with pytest.raises(ChamberError):
        renormalized_class(d.components[0], Chamber((Fraction(0),)), 64)


def test_nclass_index_matches_exact():
    for name in ("cp2-s1-011", "cp3-s1-0011-o2", "s2-twisted"):
        d = builtin_datasets(name)
        total = sum(v for _, _, v in nclass_contributions(d, default_chamber(d), 2048))
        assert abs(total - float(index_compute(d, "exact").exact_index)) < 1e-9, name


def test_ball_average_converges_slowly():
    f = LaurentRational(U ** -1 + U, U ** -1 - U)

    def term(u):
        return f.evaluate((u,))

    q = Chamber((Fraction(1, 2),))
    want = av_numeric(term, q, 256).value.real
    near = ball_average(term, 1, 200 * 2 * np.pi, shift=[0.5])
    assert abs(near - want) < 1e-2
    assert ball_average(lambda: 3.0, 0, 1.0) == 3.0


@settings(max_examples=25, deadline=None)
@given(st.integers(-40, 40).filter(lambda a: a != 0), st.integers(-40, 40).filter(lambda a: a != 0))
def test_total_is_chamber_invariant(a, b):
    d = builtin_datasets("cp2-s1-011")
    x = index_compute(d, "numeric", chamber=(Fraction(a, 10),)).numeric_index
    y = index_compute(d, "numeric", chamber=(Fraction(b, 10),)).numeric_index
    assert abs(x - y) < 1e-9
