"""
Acceptance suite.  Each test prints one PASS/FAIL line for its criterion and
then asserts it, so a failing criterion is red in pytest as well.

    python tests/test_acceptance.py
"""

import itertools
import os
import random
import subprocess
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from cdgl import checks
from cdgl.cells import INCONSISTENT, CellAttachment, automorphism_family, classify_attachment
from cdgl.cli import SCENARIOS, run_scenario
from cdgl.core.complexes import DegreeWindow
from cdgl.derivations import Derivation, DerivationComplex, der_differential, psi_iso, solve_primitive_coefficients
from cdgl.dsl import parse_model
from cdgl.fixtures import STRUCTURAL, TEXTS
from cdgl.freelie import bracket
from cdgl.mc import bch
from cdgl.models import Setting, build_fibration_model, quasi_iso_suite

from conftest import cached_fixture
from oracles import primitive_dimension, tensor_bch


@pytest.fixture
def verdict(capsys):
    def emit(n, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'}  criterion {n}: {title}" + (f"  [{detail}]" if detail else ""))
        assert ok, detail
    return emit


def ad_power(x, i, v):
    for _ in range(i):
        v = bracket(x, v)
    return v


def test_criterion_1_structural_axioms(verdict):
    bad, slowest = [], 0.0
    for name in STRUCTURAL:
        t = time.time()
        script = parse_model(TEXTS[name])
        rep = run_scenario("check", script, {"window": DegreeWindow(-2, 8), "truncate": 6, "wedge": 6,
                                             "cases": 200})
        p = script.presentation(truncation=6)
        kind = "DerM" if p.sub is not None else "Der"
        der = DerivationComplex(p, kind, window=DegreeWindow(-2, 8))
        elapsed = time.time() - t
        slowest = max(slowest, elapsed)
        if rep["status"] != "pass" or der.check_square_zero() or elapsed > 60:
            bad.append(name)
    verdict(1, "d^2 = 0, D^2 = 0 and 200-case axiom suites on every structural fixture, window -2..8",
            not bad, f"failing: {bad}" if bad else f"slowest fixture {slowest:.1f}s")


def test_criterion_2_disk_example(verdict):
    p = cached_fixture("disk1")
    c = DerivationComplex(p, "cDerM", window=DegreeWindow(-1, 5))
    betti = [c.betti(k) for k in range(4)]
    x, y = p.gen("x"), p.gen("y")
    a = [None, Fraction(3), Fraction(-2), Fraction(5, 7), Fraction(1, 3), Fraction(11)]
    theta = Derivation(p, 0, {"y": sum((ad_power(x, i, y) * a[i] for i in range(1, 6)), p.zero(1))})
    terms = [bracket(y, ad_power(x, i, y)) for i in range(5)]
    b = solve_primitive_coefficients(theta, [Derivation(p, 1, {"y": t}) for t in terms])
    expected = [a[1] / 2, a[2], a[3], a[4], a[5]]
    eta = Derivation(p, 1, {"y": sum((t * c_ for t, c_ in zip(terms, b or [])), p.zero(2))})
    ok = betti == [0, 0, 0, 0] and b == expected and der_differential(eta) == theta
    verdict(2, "disk: H_0..3 of the connected relative derivations vanish; b0 = a1/2 and bi = a(i+1)",
            ok, f"betti {betti}, b {[str(v) for v in b or []]}")


def test_criterion_3_psi(verdict):
    bad = []
    for name in ("disk1", "disk2", "disk3", "cp2"):
        cert = psi_iso(cached_fixture(name), window=DegreeWindow(-2, 8))
        if not (cert.chain_map and cert.bijective):
            bad.append(name)
    verdict(3, "psi commutes with the differentials and is bijective on disk and cp2 fixtures",
            not bad, f"failing: {bad}" if bad else "window -2..8")


def test_criterion_4_quasi_iso_suite(verdict):
    failing = []
    for name in ("disk1", "cp2"):
        out = quasi_iso_suite(Setting(cached_fixture(name)), DegreeWindow(0, 3))
        for c in out["maps"]:
            for what, value in (("chain map", c.chain_map), ("bracket", c.bracket),
                                ("quasi-iso", c.quasi_iso.ok)):
                if value is False:
                    failing.append(f"{name}: {c.name} {what}")
        if not out["eta_sigma_identity"]:
            failing.append(f"{name}: η∘σ = id")
        for k, v in out["acyclic"].items():
            if any(v):
                failing.append(f"{name}: acyclic {k}")
    # known outcome: ρ, ρ̄ and η fail the bracket check and the twisted differential used
    # for σ, η does not square to zero; everything else holds
    verdict(4, "Φ, ρ, ρ̄, σ, η, κ̄, κ certified as dgl maps and quasi-isomorphisms in degrees 0..3",
            not failing, "; ".join(failing))


def test_criterion_5_fibration(verdict):
    bad = []
    names = [n for n in TEXTS if n != "mctoy"]
    for name in names:
        m = build_fibration_model(cached_fixture(name))
        if not (m.ok and all(m.companion.values())):
            bad.append(name)
    verdict(5, "short exact fibration sequence with M-section on every fixture with a sub model",
            not bad, f"failing: {bad}" if bad else ", ".join(names))


def test_criterion_6_gauge_bch(verdict):
    toy = cached_fixture("mctoy")
    mcs = [toy.zero(-1), toy.gen("u")]
    results = {
        "gauge preserves MC": checks.gauge_mc_suite(toy, mcs, 100, 1),
        "action property": checks.gauge_action_suite(toy, mcs, 100, 2),
        "bch associativity": checks.bch_associativity_suite(toy, 100, 3),
        "exp composition (mctoy)": checks.exp_bch_suite(toy, 100, 4),
        "exp composition (disk1)": checks.exp_bch_suite(cached_fixture("disk1"), 100, 5),
        "exp composition (cp3)": checks.exp_bch_suite(cached_fixture("cp3"), 100, 6),
    }
    bad = [k for k, v in results.items() if v]
    verdict(6, "gauge action, action property, bch associativity, exp∘bch, 100 cases each",
            not bad, f"failing: {bad}" if bad else "")


def test_criterion_7_cp2_pipeline(verdict):
    c = CellAttachment.from_presentation(cached_fixture("cp2"))
    r = classify_attachment(c, DegreeWindow(0, 3))
    fam = automorphism_family(c)
    stated = [x for x in r.comparisons if x["reading"] == "as stated"][0]
    checks_ = {
        "H_1 = Q directly": r.betti_direct[1] == 1,
        "H_1 = Q through psi": r.betti_psi[1] == 1,
        "H_0 = 0 directly": r.betti_direct[0] == 0,
        "H_0 = 0 through psi": r.betti_psi[0] == 0,
        "lambda forced by the parameter solve": fam.lambda_forced and r.lambda_forced_by_solve,
        "lambda forced by homology": r.lambda_forced_by_homology,
        "stated H_0 count flagged": stated["flag"] == INCONSISTENT,
    }
    bad = [k for k, v in checks_.items() if not v]
    verdict(7, "cp2: H_1 = Q, H_0 = 0, lambda = 1, each two ways; H_0 count flag emitted",
            not bad, f"failing: {bad}" if bad else f"flag {stated['flag']}")


def test_criterion_8_oracles(verdict):
    bad = []
    for name in sorted(TEXTS):
        p = cached_fixture(name)
        for k in range(1, 7):
            for c in itertools.combinations_with_replacement(range(len(p.names)), k):
                if sum(p.deg[g] for g in c) <= 8 and len(p.basis.by_content[c]) != primitive_dimension(c, p.deg):
                    bad.append(f"{name} {c}")
    toy = cached_fixture("mctoy")
    t, s = toy.gen("t"), toy.gen("s")
    if bch(t, s).terms != tensor_bch(t.terms, s.terms, 6):
        bad.append("bch(t, s)")
    rng = random.Random(8)
    for _ in range(20):
        x, y = checks.random_element(toy, rng, 0), checks.random_element(toy, rng, 0)
        if bch(x, y).terms != tensor_bch(x.terms, y.terms, 6):
            bad.append("bch random")
            break
    verdict(8, "Lie basis dimensions and bch agree with the tensor algebra oracles",
            not bad, f"failing: {bad[:5]}" if bad else "")


# scenario -> fixture used for the determinism runs
DETERMINISM = {s: "cp2" for s in SCENARIOS}
DETERMINISM.update({"mc": "mctoy", "gauge": "mctoy"})


def _report(scenario, fixture, hashseed):
    env = dict(os.environ, PYTHONHASHSEED=str(hashseed))
    r = subprocess.run([sys.executable, "-m", "cdgl.cli", scenario, fixture, "--json", "-"],
                       capture_output=True, env=env)
    return r.stdout


def test_criterion_9_determinism(verdict):
    jobs = [(s, f, seed) for s, f in DETERMINISM.items() for seed in (0, 1, 2)]
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as ex:
        outs = list(ex.map(lambda j: _report(*j), jobs))
    runs = {}
    for (s, _, _), out in zip(jobs, outs):
        runs.setdefault(s, []).append(out)
    bad = [s for s, o in runs.items() if len(set(o)) != 1 or not o[0]]
    verdict(9, "every scenario report is byte-identical across 3 runs (hash seeds 0, 1, 2)",
            not bad, f"failing: {bad}" if bad else f"{len(runs)} scenarios")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
