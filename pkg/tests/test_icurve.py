import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from lipsat.cyclo import CycRat
from lipsat.errors import NotFiniteColength, NotNested, TruncationInsufficient
from lipsat.icurve import (
    DvrMatrix,
    IdealOnCurve,
    colength,
    division_certificate,
    dvr_membership,
    dvr_reduce,
    ic_membership,
    ideal_multiplicity,
    pair_multiplicity_dvr,
    pullback_ideal,
)
from lipsat.poly import Poly, parse_poly
from lipsat.puiseux import Branch
from lipsat.series import PSeries
from oracles import colength_mod, in_module_mod, local_colength, poly_mul, poly_order

XY = ("x", "y")
Z5 = CycRat.zeta(5)


def P(text):
    return parse_poly(text, XY)


def jacobian(text):
    f = P(text)
    return IdealOnCurve([f.partial("x"), f.partial("y")], f)


def S(coeffs):
    """Exact series from a coefficient list."""
    return PSeries({e: c for e, c in enumerate(coeffs) if c})


def as_list(s, D):
    return [s.coefficient(e).to_fraction() for e in range(D)]


# -- pullbacks and membership on branches --------------------------------------


def test_pullback_of_jacobian_on_golden_branch():
    I = jacobian("x^2+y^5")
    (b,) = I.branches
    vals, m = pullback_ideal(I, b)
    assert [v.order() for v in vals] == [5, 8] and m == 5


def test_pullback_of_maximal_ideal():
    I = IdealOnCurve([P("x"), P("y")], P("x^2+y^5"))
    _, m = pullback_ideal(I, I.branches[0])
    assert m == 2


def test_pullback_vanishing_ideal_is_an_error():
    I = IdealOnCurve([P("y")], P("x*y"))
    b = Branch(XY, (PSeries.t(), PSeries.zero()))
    with pytest.raises(TruncationInsufficient):
        pullback_ideal(I, b)


@pytest.mark.parametrize("h,yes", [("y^3", True), ("y^2", False), ("2*x", True), ("x*y", True), ("y^4", True)])
def test_ic_membership_examples(h, yes):
    v = ic_membership(P(h), jacobian("x^2+y^5"))
    assert v.is_yes == yes and v.kind in ("CertifiedYes", "CertifiedNo")


def test_ic_no_reports_both_orders():
    v = ic_membership(P("y^2"), jacobian("x^2+y^5"))
    assert v.witness.order_h == 4 and v.witness.min_order == 5


@pytest.mark.parametrize("p", [5, 7, 9])
def test_ic_threshold(p):
    I = jacobian(f"x^2+y^{p}")
    for q in range(1, p + 1):
        assert ic_membership(P(f"y^{q}"), I).is_yes == (2 * q >= p)


monomials = st.tuples(st.integers(0, 4), st.integers(0, 6)).filter(lambda e: sum(e) > 0)
small_polys = st.dictionaries(monomials, st.integers(-3, 3).filter(bool), min_size=1, max_size=4).map(
    lambda d: Poly(XY, d)
)
units = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)), st.integers(-3, 3).filter(bool), max_size=3)


@given(small_polys, small_polys, units)
def test_ic_membership_is_closed_under_sums_and_multiples(h, g, u):
    I = jacobian("x^2+y^5")
    u = Poly(XY, {**u, (0, 0): 1})
    assume(not (h + g).is_zero())
    if ic_membership(h, I).is_yes and ic_membership(g, I).is_yes:
        assert ic_membership(h + g, I).is_yes
        assert ic_membership(u * h, I).is_yes


@given(small_polys, small_polys)
def test_ideal_members_are_in_the_closure(a, b):
    I = jacobian("x^2+y^7")
    h = a * I.gens[0] + b * I.gens[1]
    assume(not h.is_zero())
    assert ic_membership(h, I).is_yes


# -- multiplicities -----------------------------------------------------------------


def _dicts(polys):
    return [{e: c.to_fraction() for e, c in p.terms.items()} for p in polys]


MULT_CASES = [
    (["x", "y"], "x^2+y^5", 2),
    (["2*x", "5*y^4"], "x^2+y^5", 5),
    (["x", "y"], "x*y", 2),
    (["2*x", "3*y^2"], "x^2-y^3", 3),
    (["3*x^2", "4*y^3"], "x^3+y^4", 8),
    (["x^2", "y"], "x^3-y^7", 3),
]


@pytest.mark.parametrize("gens,curve,expected", MULT_CASES)
def test_ideal_multiplicity_matches_colength_oracle(gens, curve, expected):
    # on a curve, e(I) is the intersection number of f with a generic element of I
    gs, f = [P(g) for g in gens], P(curve)
    generic = gs[0] * 3 + gs[1] * 7
    assert ideal_multiplicity(IdealOnCurve(gs, f)) == expected
    assert local_colength(_dicts([f, generic]), 2, 14) == expected
    assert colength([f, generic], XY) == expected


def test_multiplicity_exceeds_plain_colength():
    I = jacobian("x^2+y^5")
    assert colength(I.gens + [I.curve], XY) == 4
    assert ideal_multiplicity(I) == 5


def test_multiplicity_needs_finite_colength():
    with pytest.raises(NotFiniteColength):
        ideal_multiplicity(IdealOnCurve([P("y")], P("x*y")))


# -- division certificates -------------------------------------------------------------


@pytest.mark.parametrize("h", ["y^4", "x*y", "x^2", "y^5"])
def test_division_certificate_verifies(h):
    I = jacobian("x^2+y^5")
    cert = division_certificate(P(h), I.gens, I.curve)
    assert cert is not None and cert.verify(P(h), I.gens, I.curve)


def test_division_certificate_absent_outside_ideal():
    I = jacobian("x^2+y^5")
    assert division_certificate(P("y^3"), I.gens, I.curve) is None


def test_tampered_division_certificate_fails():
    I = jacobian("x^2+y^5")
    cert = division_certificate(P("y^4"), I.gens, I.curve)
    assert not cert.verify(P("y^4") + P("y^6"), I.gens, I.curve)


# -- reduction over the series ring ------------------------------------------------------


def test_rank_one_pivot():
    E = dvr_reduce(DvrMatrix([(S([0, 0, 1]),), (PSeries({5: 1}),)]))
    assert E.pivot_valuations() == [2]


def test_triangular_pivots():
    E = dvr_reduce(DvrMatrix([(PSeries({5: 1}), PSeries({5: 1})), (PSeries.zero(), PSeries({7: 1}))]))
    assert E.pivot_valuations() == [5, 7]


def test_equal_valuation_pivots():
    E = dvr_reduce(DvrMatrix([(PSeries({3: 1}), PSeries({3: 1})), (PSeries({3: 1}), PSeries({3: 2}))]))
    assert E.pivot_valuations() == [3, 3]


def _golden_matrix():
    c = CycRat.rational(1) - Z5
    return DvrMatrix([
        (PSeries({5: 1}), PSeries({5: 1})),
        (PSeries.zero(), PSeries({7: c})),
        (PSeries({7: c}), PSeries.zero()),
        (PSeries({8: 1}), PSeries({8: Z5 ** 4})),
    ])


def test_golden_module_rejects_twisted_target():
    v = dvr_membership([PSeries({6: 1}), PSeries({6: Z5 ** 3})], _golden_matrix())
    assert v.is_no and v.witness.row == 1 and v.witness.valuation == 6
    assert all(p >= 7 for p in v.witness.pivots[1:])


def test_golden_module_contains_its_columns():
    M = _golden_matrix()
    for col in M.cols:
        v = dvr_membership(list(col), M)
        assert v.is_yes
        assert [a - b for a, b in zip(v.certificate.apply(M), col)] == [PSeries.zero()] * 2


def _random_series(rng, deg=8):
    start = rng.randint(0, 4)
    return S([0] * start + [rng.randint(-3, 3) for _ in range(start, deg + 1)])


def _full_rank_instance(rng):
    while True:
        ncols = rng.randint(2, 4)
        cols = [(_random_series(rng), _random_series(rng)) for _ in range(ncols)]
        try:
            E = dvr_reduce(DvrMatrix(cols))
        except TruncationInsufficient:
            continue
        if all(p is not None for p in E.pivots):
            return cols, E


def test_dvr_membership_agrees_with_linear_algebra_oracle():
    rng = random.Random(20240601)
    agree = yes = 0
    N = 120
    for _ in range(N):
        cols, E = _full_rank_instance(rng)
        D = int(sum(E.pivot_valuations())) + 1
        if rng.random() < 0.5:
            v = [PSeries.zero(), PSeries.zero()]
            for c in cols:
                a = _random_series(rng, 3)
                v = [v[0] + a * c[0], v[1] + a * c[1]]
        else:
            v = [_random_series(rng), _random_series(rng)]
        k = rng.randint(0, D)
        v[rng.randint(0, 1)] += PSeries({k: rng.choice([1, -1, 2])})
        got = dvr_membership(v, DvrMatrix(cols)).is_yes
        Dv = D + 9
        want = in_module_mod([as_list(e, Dv) for e in v], [[as_list(e, Dv) for e in c] for c in cols], Dv)
        agree += got == want
        yes += want
    assert agree == N
    assert 0 < yes < N


@given(st.integers(0, 10**9))
def test_reduction_preserves_span(seed):
    cols, E = _full_rank_instance(random.Random(seed))
    M = DvrMatrix(cols)
    for c in E.cols:
        assert dvr_membership(list(c), M).is_yes
    for c in cols:
        assert dvr_membership(list(c), E).is_yes
    piv = [p for p in E.pivots if p is not None]
    assert [p[0] for p in piv] == sorted(p[0] for p in piv)


# -- pair multiplicity -----------------------------------------------------------


def _mat_apply(cols, A):
    """Columns of cols * A for a 2x2 polynomial matrix A."""
    return [tuple(cols[0][r] * A[0][j] + cols[1][r] * A[1][j] for r in range(2)) for j in range(2)]


def _random_matrix(rng):
    A = [[_random_series(rng, 3) for _ in range(2)] for _ in range(2)]
    return A


def _det_order(A, D=40):
    a = [[as_list(A[i][j], D) for j in range(2)] for i in range(2)]
    d = [x - y for x, y in zip(poly_mul(a[0][0], a[1][1]), poly_mul(a[0][1], a[1][0]))]
    return poly_order(d)


def test_pair_multiplicity_examples():
    assert pair_multiplicity_dvr(DvrMatrix([(PSeries({5: 1}),)]), DvrMatrix([(PSeries({2: 1}),)])) == 3
    M = _golden_matrix()
    assert pair_multiplicity_dvr(M, M) == 0


def test_pair_multiplicity_not_nested():
    with pytest.raises(NotNested):
        pair_multiplicity_dvr(DvrMatrix([(PSeries({2: 1}),)]), DvrMatrix([(PSeries({5: 1}),)]))


def test_pair_multiplicity_additivity():
    rng = random.Random(7)
    done = 0
    while done < 60:
        A, B = _random_matrix(rng), _random_matrix(rng)
        a, b = _det_order(A), _det_order(B)
        if a is None or b is None or a + b > 12:
            continue
        Pc = [(PSeries({rng.randint(0, 2): 1}), _random_series(rng, 3)), (PSeries.zero(), PSeries({rng.randint(0, 2): 1}))]
        Nc = _mat_apply(Pc, A)
        Mc = _mat_apply(Nc, B)
        Pm, Nm, Mm = DvrMatrix(Pc), DvrMatrix(Nc), DvrMatrix(Mc)
        eMN = pair_multiplicity_dvr(Mm, Nm)
        eNP = pair_multiplicity_dvr(Nm, Pm)
        eMP = pair_multiplicity_dvr(Mm, Pm)
        assert eMP == eMN + eNP
        assert (eMN, eNP) == (b, a)
        assert pair_multiplicity_dvr(Mm, Mm) == 0
        D = int(eMP) + 8
        lists = lambda cols: [[as_list(e, D) for e in c] for c in cols]
        assert colength_mod(lists(Mc), 2, D) - colength_mod(lists(Nc), 2, D) == eMN
        done += 1
