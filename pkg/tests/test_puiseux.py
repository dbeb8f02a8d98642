from fractions import Fraction
from math import gcd

import pytest

from lipsat.errors import NoSingularPoint, NotSquarefree, UnsupportedExtension
from lipsat.poly import parse_poly
from lipsat.puiseux import Branch, default_trunc, puiseux_branches, verify_branch
from lipsat.series import PSeries

XY = ("x", "y")
CORPUS = ["x*y", "x^2-y^3", "x^2+y^5", "x^3+y^4", "x^3-y^7", "(x^2-y^3)*(x^2+y^5)"]


def P(text):
    return parse_poly(text, XY)


def test_axes():
    bs = puiseux_branches(P("x*y"))
    assert sorted(b.short() for b in bs) == ["(0, t) [mult 1]", "(t, 0) [mult 1]"]


def test_cusp():
    (b,) = puiseux_branches(P("x^2-y^3"))
    assert b.short() == "(t^3, t^2) [mult 2]"


def test_golden_curve():
    (b,) = puiseux_branches(P("x^2+y^5"))
    assert b.short() == "(t^5, -t^2) [mult 2]"


@pytest.mark.parametrize("text", CORPUS)
def test_branches_vanish_at_twice_default_truncation(text):
    f = P(text)
    T = 2 * default_trunc(f)
    for b in puiseux_branches(f, T):
        assert verify_branch(f, b, T)
        assert all(c.order() > 0 for c in b.comps if c.has_known_order())


@pytest.mark.parametrize("text", CORPUS)
def test_multiplicities_sum_to_curve_order(text):
    f = P(text)
    assert sum(b.mult for b in puiseux_branches(f)) == f.order()


@pytest.mark.parametrize("a,b", [(2, 3), (2, 5), (3, 4), (4, 6), (2, 4), (6, 9), (3, 3)])
def test_quasi_homogeneous_branch_count(a, b):
    d = gcd(a, b)
    f = P(f"x^{a}+y^{b}")
    bs = puiseux_branches(f)
    assert len(bs) == d
    for br in bs:
        assert sorted(c.order() for c in br.comps) == sorted([b // d, a // d])
        assert verify_branch(f, br, 40)


def test_verify_branch_rejects_wrong_sign():
    f = P("x^2+y^5")
    assert verify_branch(f, Branch(XY, (PSeries({5: 1}), PSeries({2: -1}))))
    bad = Branch(XY, (PSeries({5: 1}), PSeries({2: 1})))
    assert not verify_branch(f, bad)
    assert f.substitute(dict(zip(XY, bad.comps))) == PSeries({10: 2})


def test_verify_branch_on_axis():
    assert verify_branch(P("x*y"), Branch(XY, (PSeries.t(), PSeries.zero())))


def test_parametrization_is_primitive():
    for text in CORPUS:
        for b in puiseux_branches(P(text)):
            g = 0
            for c in b.comps:
                for e, _ in c.items():
                    g = gcd(g, int(Fraction(e) * c.ram))
            assert g == 1


def test_surd_coefficients():
    f = P("x^2-3*y^2")
    bs = puiseux_branches(f)
    assert len(bs) == 2 and all(verify_branch(f, b, 30) for b in bs)


def test_non_cyclotomic_extension_is_rejected():
    with pytest.raises(UnsupportedExtension) as e:
        puiseux_branches(P("x^3-2*y^3"))
    assert "Z^3" in str(e.value)


def test_repeated_factor_is_rejected():
    with pytest.raises(NotSquarefree):
        puiseux_branches(P("(x^2-y^3)^2"))


def test_unit_is_rejected():
    with pytest.raises(NoSingularPoint):
        puiseux_branches(P("1+x"))


def test_json_round_trip():
    for b in puiseux_branches(P("(x^2-y^3)*(x^2+y^5)")):
        assert Branch.from_json(b.to_json()) == b
