from fractions import Fraction

import pytest

from cdgl.convolution import (COHERENT, PLUS, ConvolutionElement, ce_coalgebra, conv_bracket,
                              conv_differential, hom_space, mc_residual_vec, mc_to_relative_morphism_set,
                              morphism_to_mc, restriction_sequence)
from cdgl.core.complexes import DegreeWindow
from cdgl.errors import CdglError, ResidualNonzero
from cdgl.freelie import CdglMorphism, bracket
from cdgl.models import Setting

from conftest import cached_fixture


@pytest.mark.parametrize("name", ["disk1", "cp2", "wedge"])
@pytest.mark.parametrize("sign", [COHERENT, PLUS])
def test_coalgebra_square_zero(name, sign):
    p = cached_fixture(name, 4)
    assert ce_coalgebra(p, d2_sign=sign).check_square_zero() == []


def test_counit_and_letters(fx):
    p = fx("disk1")
    C = ce_coalgebra(p, N=3)
    assert () in C.words
    assert C.d(()) == {}
    y = p.basis.by_content[(1,)][0]
    # d1(sy) = -s(dy) = -sx
    x = p.basis.by_content[(0,)][0]
    assert C.d((y,)) == {(x,): -1}


@pytest.mark.parametrize("name", ["disk1", "cp2"])
def test_q_is_mc_under_coherent_sign(name):
    p = cached_fixture(name, 4)
    sp = hom_space(p, N=4)
    assert mc_residual_vec(sp, sp.q()) == {}


def test_q_fails_mc_under_other_sign():
    # the alternative d2 sign keeps d^2 = 0 but q then misses the MC equation
    p = cached_fixture("cp2", 4)
    sp = hom_space(p, N=4, d2_sign=PLUS)
    assert mc_residual_vec(sp, sp.q()) != {}


@pytest.mark.parametrize("name", ["disk1", "cp2"])
def test_perturbed_square_zero(name):
    s = Setting(cached_fixture(name, 4))
    sp = s.space("Hom(CL,L)")
    assert sp.check_square_zero(DegreeWindow(-1, 3)) == []


def test_disk_hom_acyclic(fx):
    s = Setting(fx("disk1"))
    sp = s.space("Hom(CL,L)")
    cc = sp.chain_complex(DegreeWindow(-2, 4))
    assert [cc.betti(k) for k in range(-1, 4)] == [0, 0, 0, 0, 0]


def test_conv_bracket_axioms():
    s = Setting(cached_fixture("cp2", 4))
    sp = s.space("Hom(CbarL,L)")
    keys = sp.sample_keys(DegreeWindow(-1, 1), limit=8, seed=1)
    assert sp.check_jacobi(keys) == []
    assert sp.check_leibniz(keys) == []


def test_conv_element_ops():
    p = cached_fixture("cp2", 4)
    sp = hom_space(p, N=4)
    q = ConvolutionElement(sp, sp.q(), -1)
    r = conv_differential(q) + conv_bracket(q, q) * Fraction(1, 2)
    assert not r
    x1 = p.basis.by_content[(0,)][0]
    assert q.evaluate((x1,)) == p.gen("x1")
    assert (q - q).vec == {}


def test_morphism_to_mc(fx):
    p = fx("cp2")
    z = morphism_to_mc(CdglMorphism.identity(p), N=4)
    assert z.degree == -1
    x1 = p.basis.by_content[(0,)][0]
    assert z.evaluate((x1,)) == p.gen("x1")
    with pytest.raises(ResidualNonzero):
        morphism_to_mc(CdglMorphism.identity(p), N=4, d2_sign=PLUS)


def test_relative_morphism_set():
    p = cached_fixture("wedge", 4)
    s = Setting(p)
    phi = CdglMorphism.identity(p)
    a, x = p.gen("a"), p.gen("x")
    assert not mc_to_relative_morphism_set(s.space("HomM"), phi, {"a": a, "x": x})
    z = mc_to_relative_morphism_set(s.space("HomM"), phi, {"a": a, "x": x * 2})
    xi = p.basis.by_content[(1,)][0]
    assert z.degree == -1 and z.evaluate((xi,)) == x
    with pytest.raises(CdglError):
        mc_to_relative_morphism_set(s.space("HomM"), phi, {"a": a * 2, "x": x})


@pytest.mark.parametrize("name", ["disk1", "cp2", "wedge"])
def test_restriction_sequence(name):
    seq = restriction_sequence(cached_fixture(name, 4), window=DegreeWindow(-1, 3))
    assert seq.exact and seq.chain_map and seq.restricts_q and seq.kernel_vanishes_on_M
    assert seq.ok
