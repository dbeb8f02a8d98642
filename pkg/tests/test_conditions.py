import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lipsat.conditions import (
    CONDITIONS,
    check_ilA,
    check_ilmY,
    check_W,
    cosupport_rank,
    family_ideals,
    grassmann_chart,
    hyperplane_section_check,
    parameter_sweep,
    random_samples,
)
from lipsat.cyclo import CycRat
from lipsat.errors import NonIsolatedFiber, NonIsolatedSection, NotAFamilyOverY, NotOnVariety
from lipsat.poly import Poly, parse_poly

XYW = ("x", "y", "w")
I4 = CycRat.zeta(4)


def fam(text, params=("w",)):
    vars = ("x", "y") + tuple(params)
    return family_ideals(parse_poly(text, vars), ("x", "y"), params)


def golden():
    return fam("x^2+y^5+w*y^4")


def P(text, vars=XYW):
    return parse_poly(text, vars)


# -- families ---------------------------------------------------------------------


def test_family_partials():
    f = golden()
    assert f.Jz == [P("2*x"), P("5*y^4+4*w*y^3")]
    assert f.JY == [P("y^4")]
    assert f.mY == [P("x"), P("y")]


def test_family_without_parameters_is_vacuous():
    f = family_ideals(parse_poly("x^2+y^5", ("x", "y")), ("x", "y"), ())
    assert f.JY == []
    for check in (check_ilA, check_ilmY, check_W):
        assert check(f, ()).is_yes


@pytest.mark.parametrize("text", ["x^2+y^5+w", "x^2+y^5+w*x"])
def test_parameter_axis_must_be_singular(text):
    with pytest.raises(NotAFamilyOverY):
        fam(text)


# -- condition checks -------------------------------------------------------------


def test_golden_family_at_special_fiber():
    f = golden()
    assert check_ilA(f, [0]).is_yes
    v = check_ilmY(f, [0])
    assert v.is_no and v.witness.gap == "8 < 9"
    assert check_W(f, [0]).is_open


@pytest.mark.parametrize("w", [1, 2, Fraction(1, 2), -3])
def test_golden_family_generic_fiber(w):
    f = golden()
    assert [c(f, [w]).kind for c in (check_ilA, check_ilmY, check_W)] == ["CertifiedYes"] * 3


def test_full_jacobian_variant_agrees_on_generic_fiber():
    f = golden()
    assert check_ilmY(f, [1], full_jacobian=True).kind == check_ilmY(f, [1]).kind


def test_W_failure_on_low_order_generator():
    f = fam("x^2+y^5+w*y^3")
    v = check_W(f, [0])
    assert v.is_no
    assert (v.witness.order_h, v.witness.min_order) == (6, 7)
    assert check_ilmY(f, [0]).is_no


def test_non_isolated_fiber_is_reported():
    with pytest.raises(NonIsolatedFiber):
        check_ilA(fam("x^2+w*y^5"), [0])


def test_hierarchy_on_golden_family():
    f = golden()
    for w in [0, 1, -1, 2, Fraction(1, 3)]:
        a, m, W = (c(f, [w]) for c in (check_ilA, check_ilmY, check_W))
        if m.is_yes:
            assert a.is_yes
        if W.is_no:
            assert m.is_no


# -- cosupport ranks -------------------------------------------------------------


def _point_pair(rng):
    """Two points of x^2+y^5+w*y^4 = 0 over the same w: y = s, w = r^2 - s, x = i s^2 r."""
    while True:
        r, s, r2 = (Fraction(rng.randint(1, 9), rng.randint(1, 3)) * rng.choice([1, -1]) for _ in range(3))
        if abs(r2) != abs(r):
            break
    w = r * r - s
    s2 = r2 * r2 - w
    z1 = (I4 * CycRat.rational(s * s * r), CycRat.rational(s))
    z2 = (I4 * CycRat.rational(s2 * s2 * r2), CycRat.rational(s2))
    return z1, z2, w


def _oracle_rank(f, z1, z2, w):
    """Numerical rank of the doubled m_Y J_z matrix, built from the definition."""
    gens = [m * g for m in f.mY for g in f.Jz]
    ev = lambda p, pt: p.evaluate({"x": pt[0], "y": pt[1], "w": CycRat.rational(w)}).to_complex()
    d = [z1[0] - z2[0], z1[1] - z2[1]]
    cols = []
    for g in gens:
        a, b = ev(g, z1), ev(g, z2)
        cols.append([a, b])
        for dj in d:
            cols.append([dj.to_complex() * a, 0])
            cols.append([0, dj.to_complex() * b])
    return int(np.linalg.matrix_rank(np.array(cols, dtype=complex).T, tol=1e-9))


def test_cosupport_rank_generic_pairs():
    f, rng = golden(), random.Random(11)
    for _ in range(20):
        z1, z2, w = _point_pair(rng)
        assert cosupport_rank(f, z1, z2, [w]) == 2 == _oracle_rank(f, z1, z2, w)


def test_cosupport_rank_on_loci():
    f, rng = golden(), random.Random(12)
    origin = (CycRat.rational(0), CycRat.rational(0))
    for _ in range(4):
        z1, _, w = _point_pair(rng)
        assert cosupport_rank(f, z1, z1, [w]) == 1 == _oracle_rank(f, z1, z1, w)
        assert cosupport_rank(f, z1, origin, [w]) == 1 == _oracle_rank(f, z1, origin, w)
    assert cosupport_rank(f, origin, origin, [3]) == 0


def test_cosupport_rank_jz_module_on_diagonal():
    f, rng = golden(), random.Random(13)
    z1, _, w = _point_pair(rng)
    assert cosupport_rank(f, z1, z1, [w], module="Jz") == 1


def test_cosupport_rank_off_variety():
    with pytest.raises(NotOnVariety):
        cosupport_rank(golden(), (1, 1), (0, 0), [1])


# -- sweeps -----------------------------------------------------------------------


def test_single_sample_sweep():
    r = parameter_sweep(golden(), [[1]])
    assert len(r.verdicts) == 1 and r.exceptional == []
    assert r.to_json()["rows"][0]["sample"] == "1"


def test_sweep_flags_special_fiber():
    r = parameter_sweep(golden(), [[w] for w in [1, 2, 3, 0]])
    assert r.exceptional == ["0"] and r.agreeing == 3
    assert r.summary["majority"] == {c: "CertifiedYes" for c in CONDITIONS}


def test_sweep_records_non_isolated_fiber():
    r = parameter_sweep(fam("x^2+w*y^5"), [[1], [0]])
    assert r.verdicts[1] == {c: "NonIsolatedFiber" for c in CONDITIONS}
    assert r.exceptional == ["0"]


def test_sweep_hierarchy():
    r = parameter_sweep(golden(), [[w] for w in random_samples(6, seed=3)] + [[0]])
    for row in r.verdicts:
        if row["iL_mY"] == "CertifiedYes":
            assert row["iL_A"] == "CertifiedYes"


def test_random_samples_are_reproducible():
    assert random_samples(5, seed=9) == random_samples(5, seed=9)
    assert len(set(random_samples(10, seed=1))) == 10


# -- Grassmann charts and hyperplane sections -------------------------------------------


def test_grassmann_example_matches_sympy():
    G, dGda, JzG, ok = grassmann_chart(parse_poly("x^2+y^2+z^2", ("x", "y", "z")))
    x, y, a1, a2 = sympy.symbols("x y a1 a2")
    ref = x**2 + y**2 + (a1 * x + a2 * y) ** 2
    to_sym = lambda p: sympy.sympify(str(p).replace("^", "**"))
    assert sympy.expand(to_sym(G) - ref) == 0
    assert sympy.expand(to_sym(dGda[0]) - sympy.diff(ref, a1)) == 0
    assert sympy.expand(to_sym(dGda[0]) - 2 * x * (a1 * x + a2 * y)) == 0
    assert ok


def test_grassmann_linear_form():
    G, dGda, JzG, ok = grassmann_chart(parse_poly("x+2*y-z", ("x", "y", "z")))
    assert ok and all(not ({"x", "y"} & set(j.used_vars())) for j in JzG)


cubic_terms = st.dictionaries(
    st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)).filter(lambda e: 0 < sum(e) <= 6),
    st.integers(-5, 5).filter(bool),
    min_size=1,
    max_size=6,
)


@settings(max_examples=20)
@given(cubic_terms, st.integers(0, 2))
def test_grassmann_identity(terms, chart):
    F = Poly(("x", "y", "z"), terms)
    G, dGda, JzG, ok = grassmann_chart(F, chart)
    assert ok
    zk = F.vars[chart]
    others = [v for v in F.vars if v != zk]
    beta = {v: Poly.var(v, G.vars) for v in others}
    beta[zk] = Poly.var("a1", G.vars) * Poly.var(others[0], G.vars) + Poly.var("a2", G.vars) * Poly.var(others[1], G.vars)
    dF = F.partial(zk).subs(beta).with_vars(G.vars)
    for d, v in zip(dGda, others):
        assert d - Poly.var(v, G.vars) * dF == Poly.const(0, G.vars)


def test_section_of_A2():
    v = hyperplane_section_check(parse_poly("x^2+y^2+z^3", ("x", "y", "z")), [0, 0, 1])
    assert v.kind in ("CertifiedYes", "NoObstructionUpToBound")
    assert v.details.get("section", "x^2 + y^2").replace(" ", "") in ("x^2+y^2", "y^2+x^2")


def test_smooth_section_is_vacuous():
    v = hyperplane_section_check(parse_poly("x+y^2+z^2", ("x", "y", "z")), [0, 0, 1])
    assert v.is_yes


def test_non_reduced_section():
    with pytest.raises(NonIsolatedSection):
        hyperplane_section_check(parse_poly("x*y+z^3", ("x", "y", "z")), [1, 0, 0])


def test_hyperplane_inside_surface():
    with pytest.raises(NonIsolatedSection):
        hyperplane_section_check(parse_poly("x*y", ("x", "y", "z")), [1, 0, 0])
