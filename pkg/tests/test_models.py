from fractions import Fraction

import pytest

from cdgl.convolution import PLUS
from cdgl.core.complexes import DegreeWindow
from cdgl.errors import MissingFiltration, RuleIncompatible
from cdgl.fixtures import WITH_SUB
from cdgl.freelie import CdglPresentation
from cdgl.models import (Setting, acyclic_checks, build_fibration_model, build_twisted, long_sequence,
                         map_sigma_eta, quasi_iso_suite)

from conftest import cached_fixture

W = DegreeWindow(0, 3)


@pytest.fixture(scope="module", params=["disk1", "cp2"])
def suite(request):
    s = Setting(cached_fixture(request.param))
    r = quasi_iso_suite(s, W)
    return request.param, {c.name: c for c in r["maps"]}, r


def test_phi_and_kappa_are_quasi_isos(suite):
    name, maps, _ = suite
    for m in ("Φ", "κ", "κ̄"):
        assert maps[m].chain_map and maps[m].quasi_iso.ok, m
    assert maps["κ"].bracket and maps["κ̄"].bracket


def test_rho_chain_quasi_iso_but_not_bracket(suite):
    # ρ and ρ̄ are chain quasi-isomorphisms; as dgl maps they fail the bracket check
    name, maps, _ = suite
    for m in ("ρ", "ρ̄"):
        assert maps[m].chain_map and maps[m].quasi_iso.ok
        assert maps[m].bracket is False


def test_tilde_differential_not_square_zero(suite):
    # the twisted differential on L ×̃ Hom^M ×̃ Der^M misses D² = 0, so σ is not a chain map
    # while η still is, and η∘σ = id holds regardless
    name, maps, r = suite
    assert r["tilde_square_zero"] is False
    assert maps["σ"].chain_map is False
    assert maps["η"].chain_map is True
    assert maps["η"].bracket is False
    assert maps["σ"].quasi_iso.not_complexes and maps["η"].quasi_iso.not_complexes
    assert r["eta_sigma_identity"]


def test_cp2_ranks(suite):
    name, maps, _ = suite
    if name != "cp2":
        pytest.skip("cp2 only")
    ranks = {m: {k: maps[m].quasi_iso.summary()[str(k)]["rank"] for k in range(4)} for m in ("Φ", "ρ", "κ")}
    assert ranks["Φ"] == {0: 1, 1: 0, 2: 1, 3: 0}
    assert ranks["ρ"] == {0: 0, 1: 1, 2: 1, 3: 0}
    assert ranks["κ"] == {0: 0, 1: 1, 2: 0, 3: 0}


def test_acyclic_checks(suite):
    _, _, r = suite
    assert len(r["acyclic"]) == 6
    assert all(v == [0, 0, 0, 0] for v in r["acyclic"].values())


def test_acyclic_checks_wedge():
    out = acyclic_checks(Setting(cached_fixture("wedge", 4)), DegreeWindow(0, 2))
    assert all(v == [0, 0, 0] for v in out.values())


def test_eta_sigma_on_elements():
    s = Setting(cached_fixture("wedge", 4))
    sigma, eta = map_sigma_eta(s)
    L = s.space("L")
    for k in range(0, 4):
        for key in L.basis_keys(k):
            assert eta(sigma({key: Fraction(1)})) == {key: Fraction(1)}


@pytest.mark.parametrize("name", WITH_SUB)
def test_fibration_model(name):
    m = build_fibration_model(cached_fixture(name))
    assert m.ok, {k: v for k, v in m.certificates.items() if v is not True}
    assert all(m.companion.values())


def test_fibration_needs_filtration():
    p = CdglPresentation([("a", 1), ("b", 3)], {"b": "[a, a]"}, sub=["a"])
    with pytest.raises(MissingFiltration):
        build_fibration_model(p)


@pytest.mark.parametrize("pointed", [False, True])
def test_long_sequence_maps(pointed):
    s = Setting(cached_fixture("cp2", 4))
    maps = long_sequence(s, pointed)
    inner = DegreeWindow(0, 2)
    for f in maps:
        assert f.verify_chain_map(inner), f.name
    # fibre into total then down to the base is zero, in both fibre sequences
    for f, g in ((maps[0], maps[1]), (maps[2], maps[3])):
        for k in inner.degrees():
            for v in f.domain.elements(k):
                assert not g(f(v)), (f.name, g.name)


def test_rule_incompatible_under_plus_sign():
    s = Setting(cached_fixture("cp2", 4), d2_sign=PLUS)
    with pytest.raises(RuleIncompatible):
        build_twisted(s, "Hom(CL,L)", check_window=DegreeWindow(-1, 2))
    with pytest.raises(RuleIncompatible):
        s.space("no such product")
