"""Command-line front end.

Exit codes: 0 yes / open / clean report, 1 CertifiedNo, 2 usage or parse
error, 3 engine error (including insufficient truncation).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .conditions import (
    check_ilA,
    check_ilmY,
    check_W,
    cosupport_rank,
    family_ideals,
    grassmann_chart,
    hyperplane_section_check,
    parameter_sweep,
)
from .doubling import (
    PairCurve,
    SearchBound,
    build_pair_curve,
    pair_curves,
    replay_pair_witness,
    saturation_membership,
)
from .errors import LipsatError, ParseError
from .geometry import (
    INNER_PRODUCT,
    SUP_FORMULA,
    Hyperplane,
    hyperplane_distance,
    lipschitz_exponent_probe,
    tangent_commensurability_probe,
)
from .icurve import IdealOnCurve, ic_membership, ideal_multiplicity, trunc_ceiling
from .poly import parse_number, parse_poly
from .puiseux import Branch, puiseux_branches
from .verdict import NO, SCHEMA, Verdict

REPORT_SCHEMA = "lipsat.report/1"
EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3

CONFIG_KEYS = {"exp": int, "root": int, "div": int, "trunc": int, "ceiling": int, "seed": int, "format": str}


class UsageError(Exception):
    pass


class RunConfig:
    """Validated inputs for one subcommand run."""

    def __init__(self, command, args, bound, fmt="text", seed=0):
        self.command = command
        self.args = args
        self.bound = bound
        self.format = fmt
        self.seed = seed

    def to_json(self):
        return {"command": self.command, "bound": self.bound.to_json(), "seed": self.seed}


# -- parsing -------------------------------------------------------------------

def read_config(path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        if k not in CONFIG_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {k}")
        try:
            out[k] = CONFIG_KEYS[k](v)
        except ValueError:
            raise UsageError(f"{path}:{n}: bad value for {k}") from None
    return out


def _names(text):
    return tuple(s.strip() for s in text.split(",") if s.strip()) if text else ()


def _poly_list(text, vars):
    return [parse_poly(s, vars) for s in text.split(";") if s.strip()]


def _values(text):
    return [parse_number(s.strip()) for s in text.split(",") if s.strip()]


def parse_samples(text):
    """``1..10`` or a comma list of rationals."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise UsageError("empty sample range")
        return [Fraction(k) for k in range(lo, hi + 1)]
    return [Fraction(s.strip()) for s in text.split(",") if s.strip()]


def random_samples(n, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        v = Fraction(rng.randint(-12, 12), rng.randint(1, 6))
        if v not in out:
            out.append(v)
    return out


def _curve_inputs(a):
    vars = _names(a.vars) or None
    f = parse_poly(a.f, vars)
    vars = f.vars
    gens = _poly_list(a.gens, vars) if getattr(a, "gens", None) else [f.partial(v) for v in vars]
    h = parse_poly(a.h, vars) if getattr(a, "h", None) else None
    return f, gens, h


def _family(a):
    z = _names(a.z) or ("x", "y")
    params = _names(a.params)
    F = parse_poly(a.F, z + params)
    return family_ideals(F, z, params)


def _bound(a, cfg):
    def pick(name, default):
        v = getattr(a, name, None)
        return v if v is not None else cfg.get(name, default)

    b = SearchBound(
        exp=pick("exp", 6),
        root=pick("root", 0),
        div=pick("div", 10),
        trunc=pick("trunc", 24),
        ceiling=pick("ceiling", 0),
    )
    if b.exp < 1 or b.root < 0 or b.div < 0 or b.trunc < 1 or b.ceiling < 0:
        raise UsageError("bounds must be positive")
    ceiling = trunc_ceiling(b.ceiling or None)
    if b.trunc > ceiling:
        b.trunc = ceiling
    return b


# -- reports -------------------------------------------------------------------

def _report(cfg: RunConfig, inputs: dict, result) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "command": cfg.command,
        "seed": cfg.seed,
        "bound": cfg.bound.to_json(),
        "input": inputs,
        "result": result,
    }


def _verdict_exit(v: Verdict) -> int:
    return EXIT_NO if v.kind == NO else EXIT_OK


def _emit(cfg, report, text_lines, table=None, out=None):
    out = out or sys.stdout
    if cfg.format == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif cfg.format == "csv":
        if table is None:
            raise UsageError(f"csv output is not available for {cfg.command}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in table:
            w.writerow(row)
        out.write(buf.getvalue())
    else:
        out.write("\n".join(text_lines) + "\n")


# -- subcommands -----------------------------------------------------------------

def _ideal(f, gens, B):
    return IdealOnCurve(gens, f, trunc=min(B.trunc, 24))


def cmd_parametrize(cfg):
    a = cfg.args
    f = parse_poly(a.f, _names(a.vars) or None)
    T = a.trunc if a.trunc is not None else None
    bs = puiseux_branches(f, T)
    lines = [f"b{i}: {b.short()}" for i, b in enumerate(bs)]
    table = [["index", "mult", "branch"]] + [[i, b.mult, b.short()] for i, b in enumerate(bs)]
    rep = _report(cfg, {"f": str(f), "vars": list(f.vars)}, {"branches": [b.to_json() for b in bs]})
    return rep, lines, table, EXIT_OK


def _inputs(f, gens, h=None):
    d = {"f": str(f), "vars": list(f.vars), "gens": [str(g) for g in gens]}
    if h is not None:
        d["h"] = str(h)
    return d


def cmd_iclosure(cfg):
    f, gens, h = _curve_inputs(cfg.args)
    I = _ideal(f, gens, cfg.bound)
    v = ic_membership(h, I, ceiling=cfg.bound.ceiling or None)
    return _report(cfg, _inputs(f, gens, h), v.to_json()), [v.summary()], None, _verdict_exit(v)


def cmd_mult(cfg):
    f, gens, _ = _curve_inputs(cfg.args)
    I = _ideal(f, gens, cfg.bound)
    m = ideal_multiplicity(I, ceiling=cfg.bound.ceiling or None)
    return _report(cfg, _inputs(f, gens), {"multiplicity": str(m)}), [f"multiplicity {m}"], None, EXIT_OK


def cmd_saturation(cfg):
    f, gens, h = _curve_inputs(cfg.args)
    I = _ideal(f, gens, cfg.bound)
    v = saturation_membership(h, I, cfg.bound)
    lines = [v.summary()]
    if v.is_no and hasattr(v.witness, "curve"):
        w = v.witness
        lines.append(f"witness curve {w.curve.describe()} twist {w.curve.twist()} gap {w.gap}")
    return _report(cfg, _inputs(f, gens, h), v.to_json()), lines, None, _verdict_exit(v)


def _family_inputs(fam, y0):
    return {
        "F": str(fam.F),
        "fiber_vars": list(fam.fiber_vars),
        "param_vars": list(fam.param_vars),
        "at": [str(c) for c in y0],
    }


def _check(fn, **kw):
    def run(cfg):
        fam = _family(cfg.args)
        y0 = _values(cfg.args.at) if cfg.args.at else []
        v = fn(fam, y0, cfg.bound, **kw) if kw else fn(fam, y0, cfg.bound)
        return _report(cfg, _family_inputs(fam, y0), v.to_json()), [v.summary()], None, _verdict_exit(v)

    return run


def cmd_check_ilmy(cfg):
    return _check(check_ilmY, full_jacobian=cfg.args.full_jacobian)(cfg)


def cmd_cosupport(cfg):
    a = cfg.args
    fam = _family(a)
    y0 = _values(a.at) if a.at else []
    r = cosupport_rank(fam, _values(a.p1), _values(a.p2), y0, module=a.module)
    inputs = _family_inputs(fam, y0)
    inputs.update({"p1": a.p1, "p2": a.p2, "module": a.module})
    return _report(cfg, inputs, {"rank": r}), [f"rank {r}"], [["rank"], [r]], EXIT_OK


def cmd_sweep(cfg):
    a = cfg.args
    fam = _family(a)
    if a.samples:
        samples = parse_samples(a.samples)
    else:
        samples = random_samples(a.random, cfg.seed)
    rep = parameter_sweep(fam, [[s] for s in samples], cfg.bound, seed=cfg.seed)
    data = rep.to_json()
    lines = [f"{r['sample']}: " + ", ".join(f"{k}={v}" for k, v in r["verdicts"].items()) for r in data["rows"]]
    s = data["summary"]
    lines.append(f"agreeing {s['agreeing']}/{s['samples']}; exceptional: {', '.join(s['exceptional']) or 'none'}")
    conds = sorted(data["rows"][0]["verdicts"]) if data["rows"] else []
    table = [["sample"] + conds] + [[r["sample"]] + [r["verdicts"][c] for c in conds] for r in data["rows"]]
    return _report(cfg, _family_inputs(fam, []), data), lines, table, EXIT_OK


def cmd_grassmann(cfg):
    a = cfg.args
    F = parse_poly(a.F, _names(a.vars) or None)
    G, dGda, JzG, ok = grassmann_chart(F, a.chart)
    lines = [f"G = {G}"] + [f"dG/da{i + 1} = {d}" for i, d in enumerate(dGda)]
    lines.append(f"chart identity {'holds' if ok else 'FAILS'}")
    result = {"G": str(G), "dGda": [str(d) for d in dGda], "JzG": [str(j) for j in JzG], "identity": ok}
    return _report(cfg, {"F": str(F), "chart": a.chart}, result), lines, None, EXIT_OK if ok else EXIT_ENGINE


def cmd_section(cfg):
    a = cfg.args
    F = parse_poly(a.F, _names(a.vars) or None)
    H = [Fraction(s.strip()) for s in a.H.split(",")]
    v = hyperplane_section_check(F, H, cfg.bound)
    inputs = {"F": str(F), "H": [str(h) for h in H]}
    return _report(cfg, inputs, v.to_json()), [v.summary()], None, _verdict_exit(v)


def cmd_distance(cfg):
    a = cfg.args
    A, B = Hyperplane.parse(a.a), Hyperplane.parse(a.b)
    methods = [a.method] if a.method else [SUP_FORMULA, INNER_PRODUCT]
    vals = {m: hyperplane_distance(A, B, m) for m in methods}
    lines = [f"{m}: {v:.12g}" for m, v in vals.items()]
    table = [["method", "distance"]] + [[m, repr(v)] for m, v in vals.items()]
    return _report(cfg, {"a": a.a, "b": a.b}, {"distance": vals}), lines, table, EXIT_OK


def cmd_probe_tangent(cfg):
    a = cfg.args
    fam = _family(a)
    y0 = _values(a.at) if a.at else []
    samples = tangent_commensurability_probe(fam, y0, a.n, seed=cfg.seed)
    ratios = [s.ratio for s in samples]
    summary = {"samples": len(samples), "min_ratio": min(ratios, default=None), "max_ratio": max(ratios, default=None)}
    lines = [f"{len(samples)} pairs; ratio min {summary['min_ratio']}, max {summary['max_ratio']}"]
    table = [["total_tangent", "fiber_tangent", "point", "ratio"]] + [
        [repr(d) for d in s.distances] + [repr(s.ratio)] for s in samples
    ]
    rep = _report(cfg, _family_inputs(fam, y0), {"summary": summary, "samples": [s.to_json() for s in samples]})
    return rep, lines, table, EXIT_OK


def cmd_probe_lipschitz(cfg):
    a = cfg.args
    f, gens, h = _curve_inputs(a)
    I = _ideal(f, gens, cfg.bound)
    curves = []
    if a.witness:
        data = _load(a.witness)
        w = data.get("result", data).get("witness") or {}
        if w.get("type") != "pair-curve":
            raise UsageError("witness file holds no pair-curve witness")
        curves.append(("witness", PairCurve.from_json(w["curve"])))
    else:
        B = cfg.bound.resolved(I.curve)
        for entry in list(pair_curves(I.branches, B))[: a.limit]:
            phi = build_pair_curve(entry, I.branches)
            curves.append((phi.describe() + f" twist {phi.twist()}", phi))
    rows = []
    for label, phi in curves:
        try:
            e = lipschitz_exponent_probe(h, I, phi)
            rows.append((label, str(e)))
        except LipsatError as err:
            rows.append((label, type(err).__name__))
    lines = [f"{lab}: exponent {e}" for lab, e in rows]
    table = [["curve", "exponent"]] + [list(r) for r in rows]
    rep = _report(cfg, _inputs(f, gens, h), {"exponents": [{"curve": lab, "exponent": e} for lab, e in rows]})
    return rep, lines, table, EXIT_OK


# -- replay ----------------------------------------------------------------------

def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read witness {path}: {e}") from None


def _replay_branch(inputs, w):
    vars = tuple(inputs["vars"])
    h = parse_poly(inputs["h"], vars)
    gens = [parse_poly(g, vars) for g in inputs["gens"]]
    b = Branch.from_json(w["branch"])
    assign = dict(zip(b.vars, b.comps))
    oh = h.substitute(assign)
    orders = [g.substitute(assign) for g in gens]
    known = [s.order() for s in orders if s.has_known_order()]
    if not oh.has_known_order() or not known:
        return False, None
    gap = f"{oh.order()} < {min(known)}"
    return oh.order() < min(known) and gap == w["gap"], gap


def _replay_division(inputs, c):
    vars = tuple(inputs["vars"])
    h = parse_poly(inputs["h"], vars)
    gens = [parse_poly(g, vars) for g in inputs["gens"]]
    f = parse_poly(inputs["f"], vars)
    from .icurve import DivisionCertificate

    cert = DivisionCertificate(
        parse_poly(c["unit"], vars),
        [parse_poly(s, vars) for s in c["coeffs"]],
        parse_poly(c["curve_coeff"], vars),
        c.get("degree"),
    )
    return cert.verify(h, gens, f)


def cmd_replay(cfg):
    data = _load(cfg.args.witness)
    try:
        inputs = data.get("input", {})
        result = data.get("result", data)
        if result.get("schema") != SCHEMA:
            raise UsageError("file does not hold a verdict record")
        w, c = result.get("witness"), result.get("certificate")
        if result["kind"] == NO and w and w.get("type") == "pair-curve":
            ok, gap = replay_pair_witness(w)
            what = f"pair-curve gap {w['gap']}"
            detail = {"recorded_gap": w["gap"], "recomputed_gap": gap}
        elif result["kind"] == NO and w and w.get("type") == "branch":
            ok, gap = _replay_branch(inputs, w)
            what = f"branch gap {w['gap']}"
            detail = {"recorded_gap": w["gap"], "recomputed_gap": gap}
        elif c and c.get("type") == "division":
            ok = _replay_division(inputs, c)
            what = "division identity"
            detail = {}
        else:
            raise UsageError("record has no replayable witness or certificate")
    except (KeyError, TypeError, AttributeError, ParseError, ValueError) as e:
        raise UsageError(f"malformed witness: {e}") from None
    status = "confirmed" if ok else "denied"
    rep = _report(cfg, {"file": cfg.args.witness}, dict(detail, status=status, kind=result["kind"]))
    return rep, [f"{what}: {status}"], None, EXIT_OK if ok else EXIT_NO


# -- argument parser ---------------------------------------------------------------

def _common(p):
    p.add_argument("--format", choices=["text", "json", "csv"], default=None)
    p.add_argument("--config", help="key = value file with bounds and defaults")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--exp", type=int, default=None, help="largest reparametrization exponent")
    p.add_argument("--root", type=int, default=None, help="largest root-of-unity order for twists")
    p.add_argument("--div", type=int, default=None, help="extra degree for division certificates")
    p.add_argument("--trunc", type=int, default=None, help="initial truncation order")
    p.add_argument("--ceiling", type=int, default=None, help="truncation ceiling")


def _curve_args(p, need_h=True):
    p.add_argument("--f", required=True, help="plane curve equation")
    p.add_argument("--vars", help="variable order, e.g. x,y")
    p.add_argument("--gens", help="ideal generators separated by ';' (default: Jacobian of f)")
    if need_h:
        p.add_argument("--h", required=True, help="test element")


def _family_args(p, at=True):
    p.add_argument("--F", required=True, help="family equation")
    p.add_argument("--z", default="x,y", help="fiber coordinates")
    p.add_argument("--params", default="", help="parameter names")
    if at:
        p.add_argument("--at", default="", help="parameter values, comma separated")


def build_parser():
    ap = argparse.ArgumentParser(prog="lipsat", description="Lipschitz saturation and equisingularity checks")
    ap.add_argument("--version", action="version", version=f"lipsat {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, help=help)
        _common(p)
        p.set_defaults(fn=fn)
        return p

    p = add("parametrize", cmd_parametrize, "Puiseux branches of a plane curve")
    p.add_argument("--f", required=True)
    p.add_argument("--vars")
    _curve_args(add("iclosure", cmd_iclosure, "integral-closure membership on a curve"))
    _curve_args(add("mult", cmd_mult, "multiplicity of an ideal on a curve"), need_h=False)
    _curve_args(add("saturation", cmd_saturation, "Lipschitz-saturation membership"))
    _family_args(add("check-ila", _check(check_ilA), "infinitesimal Lipschitz condition iL_A"))
    p = add("check-ilmy", cmd_check_ilmy, "infinitesimal Lipschitz condition iL_mY")
    _family_args(p)
    p.add_argument("--full-jacobian", action="store_true")
    _family_args(add("check-w", _check(check_W), "condition W"))
    p = add("cosupport", cmd_cosupport, "rank of the doubled module at a point pair")
    _family_args(p)
    p.add_argument("--p1", required=True, help="first fiber point")
    p.add_argument("--p2", required=True, help="second fiber point")
    p.add_argument("--module", choices=["mYJz", "Jz", "mYJ"], default="mYJz")
    p = add("sweep", cmd_sweep, "conditions over parameter samples")
    _family_args(p, at=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--samples", help="1..10 or a comma list")
    g.add_argument("--random", type=int, help="number of seeded random samples")
    p = add("grassmann", cmd_grassmann, "Grassmann chart identity")
    p.add_argument("--F", required=True)
    p.add_argument("--vars")
    p.add_argument("--chart", type=int, default=None, help="index of the solved coordinate")
    p = add("section", cmd_section, "hyperplane-section saturation test")
    p.add_argument("--F", required=True)
    p.add_argument("--vars")
    p.add_argument("--H", required=True, help="hyperplane coefficients, comma separated")
    p = add("distance", cmd_distance, "distance between hyperplanes")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--method", choices=[SUP_FORMULA, INNER_PRODUCT])
    p = add("probe-tangent", cmd_probe_tangent, "tangent-plane commensurability samples")
    _family_args(p)
    p.add_argument("--n", type=int, default=50)
    p = add("probe-lipschitz", cmd_probe_lipschitz, "Lipschitz exponents along pair-curves")
    _curve_args(p)
    p.add_argument("--witness", help="report file whose witness curve is probed")
    p.add_argument("--limit", type=int, default=20)
    p = add("replay", cmd_replay, "re-check a recorded witness or certificate")
    p.add_argument("witness")
    return ap


def parse_input(argv) -> RunConfig:
    """Parse argv into a RunConfig; argparse exits with code 2 on usage errors."""
    a = build_parser().parse_args(argv)
    cfg = read_config(a.config) if a.config else {}
    fmt = a.format or cfg.get("format", "text")
    if fmt not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {fmt}")
    seed = a.seed if a.seed is not None else cfg.get("seed", 0)
    return RunConfig(a.command, a, _bound(a, cfg), fmt, seed)


def run(cfg: RunConfig, out=None) -> int:
    report, lines, table, code = cfg.args.fn(cfg)
    _emit(cfg, report, lines, table, out)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_input(argv)
        return run(cfg)
    except (UsageError, ParseError) as e:
        print(f"lipsat: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LipsatError as e:
        print(f"lipsat: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
