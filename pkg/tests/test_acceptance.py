"""One test per acceptance criterion; each records a pass/fail line for the summary."""

import itertools
import random
import time
from fractions import Fraction

import numpy as np

from conftest import ACCEPTANCE_LINES
from lipsat.conditions import (
    CONDITIONS,
    cosupport_rank,
    family_ideals,
    grassmann_chart,
    parameter_sweep,
    random_samples,
)
from lipsat.cyclo import CycRat
from lipsat.doubling import (
    SearchBound,
    build_pair_curve,
    closure_membership_on_curve,
    double_ideal,
    pair_curves,
    replay_pair_witness,
    saturation_membership,
)
from lipsat.errors import DegenerateCurve
from lipsat.geometry import (
    INNER_PRODUCT,
    SUP_FORMULA,
    Hyperplane,
    hyperplane_distance,
    lipschitz_exponent_probe,
    product_inequality_probe,
)
from lipsat.icurve import DvrMatrix, IdealOnCurve, dvr_membership, ic_membership, pair_multiplicity_dvr
from lipsat.poly import Poly, parse_poly
from lipsat.puiseux import default_trunc, puiseux_branches, verify_branch
from lipsat.series import PSeries
from oracles import colength_mod, in_module_mod
from test_icurve import _det_order, _full_rank_instance, _mat_apply, _random_matrix, _random_series, as_list

XY = ("x", "y")


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    assert ok, detail


def jacobian(text):
    f = parse_poly(text, XY)
    return IdealOnCurve([f.partial("x"), f.partial("y")], f)


def golden_family():
    return family_ideals(parse_poly("x^2+y^5+w*y^4", ("x", "y", "w")), XY, ("w",))


def test_criterion_01_golden_example():
    rows = []
    ok = True
    for p in (5, 7, 9):
        q = (p + 1) // 2
        h = parse_poly(f"y^{q}", XY)
        t0 = time.perf_counter()
        I = jacobian(f"x^2+y^{p}")
        ic = ic_membership(h, I)
        ((_, _, oh, mo),) = ic.certificate.rows
        sat = saturation_membership(h, I)
        dt = time.perf_counter() - t0
        w = sat.witness if sat.is_no else None
        good = (
            ic.is_yes
            and (oh, mo) == (2 * q, p)
            and w is not None
            and w.extra["contraction_valuation"] == p + 2
            and w.extra["target_contraction_valuation"] == p + 1
            and dt <= 10
        )
        ok &= good
        gap = w.gap if w else "-"
        rows.append(f"p={p} closure {oh}>={mo} gap {gap} contraction {w.extra['contraction_valuation'] if w else '-'} ({dt:.2f}s)")
    record(1, ok, "; ".join(rows))


def test_criterion_02_closure_threshold():
    wrong = []
    total = 0
    for p in (5, 7):
        I = jacobian(f"x^2+y^{p}")
        for q in range(1, p + 1):
            total += 1
            if ic_membership(parse_poly(f"y^{q}", XY), I).is_yes != (2 * q >= p):
                wrong.append((p, q))
    record(2, not wrong and total == 12, f"{total - len(wrong)}/{total} threshold cases match 2q >= p")


def test_criterion_03_puiseux_soundness():
    corpus = ["x*y", "x^2-y^3", "x^2+y^5", "x^3+y^4", "x^3-y^7", "(x^2-y^3)*(x^2+y^5)"]
    bad = []
    nb = 0
    for text in corpus:
        f = parse_poly(text, XY)
        T = 2 * default_trunc(f)
        bs = puiseux_branches(f, T)
        nb += len(bs)
        if not all(verify_branch(f, b, T) for b in bs) or sum(b.mult for b in bs) != f.order():
            bad.append(text)
    record(3, not bad, f"{nb} branches on {len(corpus)} curves verified at 2T, multiplicities sum to orders" + (f"; bad {bad}" if bad else ""))


def test_criterion_04_dvr_oracle():
    rng = random.Random(4)
    N, agree = 150, 0
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
        v[rng.randint(0, 1)] += PSeries({rng.randint(0, D): rng.choice([1, -1, 3])})
        got = dvr_membership(v, DvrMatrix(cols)).is_yes
        Dv = D + 9
        want = in_module_mod([as_list(e, Dv) for e in v], [[as_list(e, Dv) for e in c] for c in cols], Dv)
        agree += got == want
    record(4, agree == N, f"{agree}/{N} rank-2 membership instances agree with the linear-algebra oracle")


def test_criterion_05_pair_multiplicity_additivity():
    rng = random.Random(5)
    done = bad = 0
    while done < 60:
        A, B = _random_matrix(rng), _random_matrix(rng)
        a, b = _det_order(A), _det_order(B)
        if a is None or b is None or a + b > 12:
            continue
        Pc = [(PSeries({rng.randint(0, 2): 1}), _random_series(rng, 3)), (PSeries.zero(), PSeries({rng.randint(0, 2): 1}))]
        Nc = _mat_apply(Pc, A)
        Mc = _mat_apply(Nc, B)
        Pm, Nm, Mm = DvrMatrix(Pc), DvrMatrix(Nc), DvrMatrix(Mc)
        eMN, eNP, eMP = pair_multiplicity_dvr(Mm, Nm), pair_multiplicity_dvr(Nm, Pm), pair_multiplicity_dvr(Mm, Pm)
        D = int(eMP) + 8
        lists = lambda cols: [[as_list(e, D) for e in c] for c in cols]
        dims = colength_mod(lists(Mc), 2, D) - colength_mod(lists(Pc), 2, D)
        if eMP != eMN + eNP or pair_multiplicity_dvr(Mm, Mm) != 0 or dims != eMP:
            bad += 1
        done += 1
    record(5, bad == 0, f"{done - bad}/{done} nested triples additive, e(M,M)=0, dimension count agrees")


def _point_pair(rng):
    i4 = CycRat.zeta(4)
    while True:
        r, s, r2 = (Fraction(rng.randint(1, 9), rng.randint(1, 3)) * rng.choice([1, -1]) for _ in range(3))
        if abs(r2) != abs(r):
            break
    w = r * r - s
    s2 = r2 * r2 - w
    return (i4 * CycRat.rational(s * s * r), CycRat.rational(s)), (i4 * CycRat.rational(s2 * s2 * r2), CycRat.rational(s2)), w


def test_criterion_06_cosupport_ranks():
    fam, rng = golden_family(), random.Random(6)
    generic = []
    for _ in range(20):
        z1, z2, w = _point_pair(rng)
        generic.append(cosupport_rank(fam, z1, z2, [w]))
    origin = (CycRat.rational(0), CycRat.rational(0))
    loci = []
    for k in range(10):
        z1, _, w = _point_pair(rng)
        pair = [(z1, z1), (z1, origin), (origin, origin)][k % 3]
        loci.append(cosupport_rank(fam, *pair, [w]))
    ok = generic == [2] * 20 and all(r <= 1 for r in loci)
    record(6, ok, f"generic ranks {sorted(set(generic))} on 20 pairs, loci ranks {sorted(set(loci))} on 10 pairs")


def test_criterion_07_distance_lemma():
    rng = random.Random(7)
    worst = 0.0
    for k in range(1000):
        n = 2 + k % 4
        A, B = (
            Hyperplane([1] + [0.999 * z / max(1.0, abs(z)) for z in (complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n - 1))])
            for _ in range(2)
        )
        worst = max(worst, abs(hyperplane_distance(A, B, SUP_FORMULA) - hyperplane_distance(A, B, INNER_PRODUCT)))
    record(7, worst <= 1e-10, f"1000 pairs in dimensions 2-5, max disagreement {worst:.2e}")


def test_criterion_08_product_lemma():
    rng = random.Random(8)
    q = lambda: (Fraction(rng.randint(-99, 99), rng.randint(1, 12)), Fraction(rng.randint(-99, 99), rng.randint(1, 12)))
    exact = product_inequality_probe([(q(), q()) for _ in range(1000)], [(q(), q()) for _ in range(1000)], exact=True)
    g = np.random.default_rng(8)
    z = lambda: g.normal(size=(100000, 2)) + 1j * g.normal(size=(100000, 2))
    flt = product_inequality_probe(z(), z(), exact=False, tol=1e-12)
    ok = exact.violations == 0 and exact.samples == 1000 and flt.violations == 0 and flt.samples == 100000
    record(8, ok, f"exact {exact.violations}/{exact.samples} violations, float {flt.violations}/{flt.samples} violations")


def test_criterion_09_grassmann_identity():
    rng = random.Random(9)
    good = 0
    for _ in range(20):
        terms = {}
        for _ in range(rng.randint(1, 8)):
            e = tuple(rng.randint(0, 6) for _ in range(3))
            if 0 < sum(e) <= 6:
                terms[e] = rng.randint(-9, 9) or 1
        F = Poly(("x", "y", "z"), terms or {(1, 1, 1): 1})
        G, dGda, _, _ = grassmann_chart(F)
        beta = {"x": Poly.var("x", G.vars), "y": Poly.var("y", G.vars)}
        beta["z"] = Poly.var("a1", G.vars) * beta["x"] + Poly.var("a2", G.vars) * beta["y"]
        dF = F.partial("z").subs(beta).with_vars(G.vars)
        zero = Poly.const(0, G.vars)
        good += all(G.partial(a) - Poly.var(v, G.vars) * dF == zero for a, v in (("a1", "x"), ("a2", "y")))
        good -= any(d != G.partial(a) for d, a in zip(dGda, ("a1", "a2")))
    record(9, good == 20, f"{good}/20 random surfaces satisfy dG/da_i = z_i dF/dz o beta exactly")


CORPUS = [
    ("x^2+y^3", ["y", "y^2", "x"]),
    ("x^2+y^5", ["y^2", "y^3", "y^4", "x*y"]),
    ("x^2+y^7", ["y^3", "y^4", "y^5"]),
    ("x^3+y^4", ["x*y", "y^3", "x*y^2"]),
]


def test_criterion_10_verdict_coherence():
    problems = []
    witnesses = curves_checked = 0
    for text, hs in CORPUS:
        I = jacobian(text)
        M = double_ideal(I.gens, XY)
        curves = list(itertools.islice(pair_curves(I.branches, SearchBound(exp=2).resolved(I.curve)), 60))
        for ht in hs:
            h = parse_poly(ht, XY)
            v = saturation_membership(h, I, SearchBound(exp=2))
            if v.is_yes and not ic_membership(h, I).is_yes:
                problems.append(f"{text}/{ht}: saturation yes without closure")
            if v.is_no:
                witnesses += 1
                ok, gap = replay_pair_witness(v.witness.to_json())
                if not ok or gap != v.witness.gap:
                    problems.append(f"{text}/{ht}: replay {gap} vs {v.witness.gap}")
                if not lipschitz_exponent_probe(h, I, v.witness.curve) < 0:
                    problems.append(f"{text}/{ht}: witness exponent not negative")
            for entry in curves:
                phi = build_pair_curve(entry, I.branches)
                try:
                    e = lipschitz_exponent_probe(h, I, phi)
                except DegenerateCurve:
                    continue
                curves_checked += 1
                if (e < 0) != closure_membership_on_curve(h, M, phi).is_no:
                    problems.append(f"{text}/{ht}: {phi.describe()} exponent {e}")
    fam = golden_family()
    sweep = parameter_sweep(fam, [[w] for w in random_samples(8, seed=10)] + [[0]])
    for s, row in zip(sweep.samples, sweep.verdicts):
        if row["iL_mY"] == "CertifiedYes" and row["iL_A"] != "CertifiedYes":
            problems.append(f"sweep {s}: iL_mY yes but iL_A {row['iL_A']}")
    detail = f"{witnesses} witnesses replayed, {curves_checked} curve exponents match verdicts, {len(sweep.samples)} sweep rows ordered"
    record(10, not problems, detail + (f"; problems {problems[:3]}" if problems else ""))


def test_criterion_11_genericity():
    samples = random_samples(10, seed=11)
    report = parameter_sweep(golden_family(), [[w] for w in samples], seed=11)
    sigs = [tuple(row[c] for c in CONDITIONS) for row in report.verdicts]
    deviants = [str(w) for w, s in zip(samples, sigs) if s != report.majority]
    ok = report.agreeing >= 9 and sorted(deviants) == sorted(report.exceptional) and len(report.verdicts) == 10
    maj = dict(zip(CONDITIONS, report.majority))
    record(11, ok, f"{report.agreeing}/10 samples agree on {maj}; exceptional {report.exceptional}")
