"""
Command line scenario runner.

    cdgl <scenario> <file.cdgl> [--truncate N] [--window a..b] [--wedge W] [--json out.json]

The model argument is a DSL file or the name of a built-in fixture.  Exit
status: 0 when every certificate passes, 1 when one fails, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import checks
from .cells import CellAttachment, automorphism_family, classify_attachment
from .convolution import COHERENT, PLUS, CECoalgebra, restriction_sequence
from .core.complexes import DegreeWindow
from .derivations import DerivationComplex, lie_chain_complex, psi_iso
from .dsl import parse_model
from .errors import CdglError
from .fixtures import PROVENANCE, TEXTS
from .freelie import check_square_zero
from .mc import MCElement, component_dgl, find_gauge_witness, gauge_act, mc_residual
from .models import Setting, build_fibration_model, quasi_iso_suite

SCHEMA = "cdgl-report/1"
SCENARIOS = ("check", "homology", "derivations", "mc", "gauge", "fibration", "classify-cell",
             "quasi-iso-suite")


def _window(w):
    return [w.min_degree, w.max_degree]


def _betti(cc, window):
    return {str(k): cc.betti(k) for k in window.degrees()}


# -- scenarios -------------------------------------------------------------------
# each returns (results, certificates) where certificates maps name -> bool


def run_check(p, opts):
    w = opts["window"]
    res, cert = {}, {}
    sq = check_square_zero(p)
    cert["d^2 = 0 on generators"] = sq.ok
    seed = opts["seed"]
    for name, suite in (("antisymmetry", checks.antisymmetry_suite), ("jacobi", checks.jacobi_suite),
                        ("leibniz", checks.leibniz_suite), ("d^2 = 0", checks.square_zero_suite)):
        fails = suite(p, cases=opts["cases"], seed=seed, window=w)
        cert[f"{name} ({opts['cases']} random cases)"] = not fails
    res["basis_dimensions"] = {str(k): len(p.basis.indices(k)) for k in w.degrees()}
    der = DerivationComplex(p, "Der", window=w)
    cert["D^2 = 0 on Der L"] = der.check_square_zero() == []
    C = CECoalgebra(p, None, p.N, opts["wedge"], COHERENT)
    cert["d^2 = 0 on C(L)"] = not C.check_square_zero()
    res["coalgebra_words"] = len(C.words)
    res["warnings"] = list(p.warnings)
    return res, cert


def run_homology(p, opts):
    w = opts["window"]
    cc = lie_chain_complex(p, DegreeWindow(w.min_degree - 1, w.max_degree + 1))
    return {"betti": _betti(cc, w)}, {"d^2 = 0": cc.check_square_zero() == []}


def run_derivations(p, opts):
    w = opts["window"]
    wide = DegreeWindow(w.min_degree - 1, w.max_degree + 1)
    res, cert = {}, {}
    kinds = ["Der"] + (["DerM"] if p.sub is not None else [])
    for kind in kinds:
        c = DerivationComplex(p, kind, window=wide)
        cert[f"D^2 = 0 on {kind}"] = c.check_square_zero() == []
        res[kind] = _betti(c.chain_complex(), w)
    if p.sub is not None and p.filtration is not None:
        c = DerivationComplex(p, "cDerM", window=DegreeWindow(-1, wide.max_degree))
        res["cDerM"] = {str(k): c.betti(k) for k in w.degrees() if k >= 0}
        res["cDerM_h0_nilpotency_class"] = c.h0_nilpotency_class()
    if p.sub is not None and len(p.inclusion().V) == 1:
        psi = psi_iso(p, window=wide)
        cert["psi chain map"] = psi.chain_map
        cert["psi bijective"] = psi.bijective
    return res, cert


def _mc_candidates(p):
    """0 and every generator of degree -1 whose residual vanishes."""
    out = [("0", p.zero(-1))]
    for g, name in enumerate(p.names):
        if p.deg[g] == -1:
            a = p.gen(name)
            if not mc_residual(p, a):
                out.append((name, a))
    return out


def run_mc(p, opts):
    res, cert = {}, {}
    w = opts["window"]
    for label, a in _mc_candidates(p):
        mc = MCElement(a)
        comp = component_dgl(p, mc, DegreeWindow(-1, w.max_degree + 1))
        cert[f"(d_a)^2 = 0 at a = {label}"] = comp.differential.square_is_zero()
        res[label] = {"betti": {str(k): comp.complex.betti(k) for k in w.degrees() if k >= 0}}
    return res, cert


def run_gauge(p, opts):
    mcs = [a for _, a in _mc_candidates(p)]
    n, seed = opts["gauge_cases"], opts["seed"]
    cert = {
        f"gauge preserves MC ({n} cases)": not checks.gauge_mc_suite(p, mcs, n, seed),
        f"action property ({n} cases)": not checks.gauge_action_suite(p, mcs, n, seed),
        f"bch associativity ({n} cases)": not checks.bch_associativity_suite(p, n, seed),
        f"exp composition ({n} cases)": not checks.exp_bch_suite(p, n, seed),
    }
    res = {"mc_elements": [label for label, _ in _mc_candidates(p)], "witnesses": {}}
    labels = _mc_candidates(p)
    rng = random.Random(seed)
    for la, a in labels:
        for lb, b in labels:
            r = find_gauge_witness(a, b, report=True)
            entry = {"found": r.found}
            if r.found:
                cert[f"witness round trip {la} -> {lb}"] = gauge_act(r.witness, a) == b
            else:
                entry["obstruction_length"] = r.obstruction_length
                entry["verdict"] = f"not equivalent at truncation {p.N}"
            res["witnesses"][f"{la} -> {lb}"] = entry
        x = checks.random_element(p, rng, 0)
        b = gauge_act(x, a)
        r = find_gauge_witness(a, b)
        cert[f"witness recovered for random x acting on {la}"] = r is not None and gauge_act(r, a) == b
    return res, cert


def run_fibration(p, opts):
    w = opts["window"]
    s = Setting(p, W=opts["wedge"])
    model = build_fibration_model(p, window=w, setting=s)
    cert = dict(model.certificates)
    cert.update({f"companion: {k}": v for k, v in model.companion.items()})
    rs = restriction_sequence(p, N=s.N, W=s.W, window=w)
    cert["restriction sequence exact"] = rs.exact
    cert["restriction chain map"] = rs.chain_map
    cert["restriction of q is jq"] = rs.restricts_q
    res = {"restriction_ranks": {str(k): {"kernel": a, "total": b, "image": c, "target": d}
                                 for k, (a, b, c, d) in sorted(rs.ranks.items())}}
    return res, cert


def run_classify(p, opts):
    w = opts["window"]
    c = CellAttachment.from_presentation(p)
    rep = classify_attachment(c, w)
    fam = automorphism_family(c)
    res = rep.as_dict()
    res["automorphism_samples"] = [[lam, ok] for lam, ok in fam.verified]
    cert = {
        "psi chain iso": rep.psi_certificate_ok,
        "direct and psi homology agree": rep.agreement,
        "lambda: parameter solve agrees with homology": rep.lambda_forced_by_solve == rep.lambda_forced_by_homology,
        "automorphism samples are morphisms": all(ok for _, ok in fam.verified),
    }
    return res, cert


def run_suite(p, opts):
    w = opts["window"]
    s = Setting(p, W=opts["wedge"], d2_sign=opts["d2_sign"])
    out = quasi_iso_suite(s, w, sample=opts["sample"], seed=opts["seed"])
    res = {"maps": {c.name: c.summary() for c in out["maps"]},
           "acyclic": {k: dict(zip(map(str, w.degrees()), v)) for k, v in out["acyclic"].items()},
           "tilde_square_zero": out["tilde_square_zero"]}
    cert = {}
    for c in out["maps"]:
        cert[f"{c.name} chain map"] = c.chain_map
        if c.bracket is not None:
            cert[f"{c.name} bracket"] = c.bracket
        cert[f"{c.name} quasi-iso"] = c.quasi_iso.ok
    cert["η∘σ = id"] = out["eta_sigma_identity"]
    cert["D̃^2 = 0"] = out["tilde_square_zero"]
    for k, v in out["acyclic"].items():
        cert[f"acyclic: {k}"] = all(b == 0 for b in v)
    return res, cert


# None means the presentation window
DEFAULT_WINDOWS = {
    "check": None,
    "homology": None,
    "derivations": DegreeWindow(0, 3),
    "mc": DegreeWindow(0, 3),
    "gauge": None,
    "fibration": DegreeWindow(-1, 4),
    "classify-cell": DegreeWindow(0, 3),
    "quasi-iso-suite": DegreeWindow(0, 3),
}

RUNNERS = {
    "check": run_check,
    "homology": run_homology,
    "derivations": run_derivations,
    "mc": run_mc,
    "gauge": run_gauge,
    "fibration": run_fibration,
    "classify-cell": run_classify,
    "quasi-iso-suite": run_suite,
}


# -- driver ----------------------------------------------------------------------

def load_model(source):
    """(script, provenance) from a file path or a built-in fixture name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text()
        script = parse_model(text)
        prov = PROVENANCE.get(script.name, "user model")
        return script, f"{prov} ({path.name})"
    if source in TEXTS:
        return parse_model(TEXTS[source]), f"{PROVENANCE[source]} (built-in)"
    raise FileNotFoundError(f"no model file or built-in fixture named {source!r}")


def default_options(**kw):
    opts = {"window": None, "wedge": None, "truncate": None, "seed": 0, "cases": 200,
            "gauge_cases": 100, "sample": None, "d2_sign": COHERENT}
    opts.update(kw)
    return opts


def run_scenario(name, script, opts=None, provenance="user model"):
    """Run one scenario and return the report as a plain dict."""
    if name not in RUNNERS:
        raise CdglError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    opts = default_options(**(opts or {}))
    p = script.presentation(truncation=opts["truncate"])
    opts["wedge"] = opts["wedge"] or p.N
    opts["window"] = opts["window"] or DEFAULT_WINDOWS[name] or p.window
    results, certs = RUNNERS[name](p, opts)
    window = opts["window"]
    return {
        "schema": SCHEMA,
        "scenario": name,
        "model": script.name or "unnamed",
        "provenance": provenance,
        "truncation": p.N,
        "wedge": opts["wedge"],
        "window": _window(window),
        "presentation_window": _window(p.window),
        "d2_sign": opts["d2_sign"],
        "certificates": certs,
        "results": results,
        "status": "pass" if all(certs.values()) else "fail",
    }


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, DegreeWindow):
        return _window(x)
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    return str(x)


def to_json(report):
    return json.dumps(_plain(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_text(report):
    rep = _plain(report)
    lines = [f"cdgl {rep['scenario']}: {rep['model']}",
             f"  provenance: {rep['provenance']}",
             f"  truncation N = {rep['truncation']}, wedge W = {rep['wedge']}, "
             f"window {rep['window'][0]}..{rep['window'][1]}"]
    lines.append("certificates:")
    for k in sorted(rep["certificates"]):
        lines.append(f"  {'PASS' if rep['certificates'][k] else 'FAIL'}  {k}")

    def walk(obj, indent):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)) and v:
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
        else:
            for v in obj:
                if isinstance(v, dict):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {json.dumps(v, ensure_ascii=False)}")

    lines.append("results:")
    walk(rep["results"], 1)
    lines.append(f"status: {rep['status']}")
    return "\n".join(lines) + "\n"


def build_parser():
    ap = argparse.ArgumentParser(prog="cdgl", description="Exact computations with cdgl presentations.")
    ap.add_argument("scenario", choices=SCENARIOS)
    ap.add_argument("model", help="a .cdgl file or a built-in fixture name")
    ap.add_argument("--truncate", type=int, metavar="N", help="bracket length truncation")
    ap.add_argument("--window", metavar="a..b", help="degree window of the report")
    ap.add_argument("--wedge", type=int, metavar="W", help="wedge length cut of the coalgebra")
    ap.add_argument("--json", metavar="out.json", help="write the structured report here ('-' for stdout)")
    ap.add_argument("--seed", type=int, default=0, help="seed of the randomized checks")
    ap.add_argument("--d2-sign", choices=(COHERENT, PLUS), default=COHERENT,
                    help="sign of the quadratic coalgebra differential")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        window = DegreeWindow.parse(args.window) if args.window else None
        script, prov = load_model(args.model)
        opts = {"window": window, "wedge": args.wedge, "truncate": args.truncate, "seed": args.seed,
                "d2_sign": args.d2_sign}
        report = run_scenario(args.scenario, script, opts, prov)
    except (CdglError, FileNotFoundError, ValueError) as e:
        print(f"cdgl: error: {e}", file=sys.stderr)
        return 2
    if args.json == "-":
        sys.stdout.write(to_json(report))
    else:
        sys.stdout.write(to_text(report))
        if args.json:
            Path(args.json).write_text(to_json(report))
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
