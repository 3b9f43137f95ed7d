"""
Randomized property suites shared by the CLI and the tests.  Every suite
takes a seed and returns the list of failing cases (empty means pass).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core.linalg import addto
from .freelie import CdglPresentation, GradedLieElement
from .mc import bch, compose, exp_aut, gauge_act, mc_residual

COEFFS = (Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3, 2))


def random_coords(p: CdglPresentation, rng, degree, max_terms=3, max_length=None):
    idx = p.basis.indices(degree, max_length)
    if not idx:
        return {}
    picks = rng.sample(idx, min(len(idx), rng.randint(1, max_terms)))
    return {i: rng.choice(COEFFS) for i in picks}


def random_element(p, rng, degree, max_terms=3, max_length=None):
    return GradedLieElement.from_coords(p, random_coords(p, rng, degree, max_terms, max_length), degree)


def _degrees(p, window=None):
    w = window or p.window
    return [k for k in w.degrees() if p.basis.indices(k)]


def _sign(a, b):
    return -1 if (a % 2 and b % 2) else 1


def antisymmetry_suite(p, cases=200, seed=0, window=None):
    rng = random.Random(seed)
    degs = _degrees(p, window)
    fails = []
    for _ in range(cases):
        i, j = rng.choice(degs), rng.choice(degs)
        a, b = random_coords(p, rng, i), random_coords(p, rng, j)
        t = p.bracket_coords(a, b)
        addto(t, p.bracket_coords(b, a), _sign(i, j))
        if t:
            fails.append((i, j, a, b))
    return fails


def jacobi_suite(p, cases=200, seed=0, window=None):
    """[a,[b,c]] = [[a,b],c] + (-1)^{|a||b|}[b,[a,c]]."""
    rng = random.Random(seed)
    degs = _degrees(p, window)
    br = p.bracket_coords
    fails = []
    for _ in range(cases):
        i, j, k = (rng.choice(degs) for _ in range(3))
        a, b, c = (random_coords(p, rng, d) for d in (i, j, k))
        t = br(a, br(b, c))
        addto(t, br(br(a, b), c), -1)
        addto(t, br(b, br(a, c)), -_sign(i, j))
        if t:
            fails.append((i, j, k, a, b, c))
    return fails


def leibniz_suite(p, cases=200, seed=0, window=None):
    """d[a,b] = [da,b] + (-1)^{|a|}[a,db]."""
    rng = random.Random(seed)
    degs = _degrees(p, window)
    br, d = p.bracket_coords, p.d_coords
    fails = []
    for _ in range(cases):
        i, j = rng.choice(degs), rng.choice(degs)
        a, b = random_coords(p, rng, i), random_coords(p, rng, j)
        t = d(br(a, b))
        addto(t, br(d(a), b), -1)
        addto(t, br(a, d(b)), -(-1 if i % 2 else 1))
        if t:
            fails.append((i, j, a, b))
    return fails


def square_zero_suite(p, cases=200, seed=0, window=None):
    rng = random.Random(seed)
    degs = _degrees(p, window)
    fails = []
    for _ in range(cases):
        a = random_coords(p, rng, rng.choice(degs))
        if p.d_coords(p.d_coords(a)):
            fails.append(a)
    return fails


# -- gauge and BCH -------------------------------------------------------------

def _deg0(p, rng, max_terms=3):
    return random_element(p, rng, 0, max_terms)


def gauge_mc_suite(p, mcs, cases=100, seed=0):
    """Residual of x G a vanishes for random x and a from ``mcs``."""
    rng = random.Random(seed)
    fails = []
    for _ in range(cases):
        x, a = _deg0(p, rng), rng.choice(mcs)
        if mc_residual(p, gauge_act(x, a)):
            fails.append((x, a))
    return fails


def gauge_action_suite(p, mcs, cases=100, seed=0):
    """y G (x G a) = bch(y, x) G a."""
    rng = random.Random(seed)
    fails = []
    for _ in range(cases):
        x, y, a = _deg0(p, rng), _deg0(p, rng), rng.choice(mcs)
        if gauge_act(y, gauge_act(x, a)) != gauge_act(bch(y, x), a):
            fails.append((x, y, a))
    return fails


def bch_associativity_suite(p, cases=100, seed=0):
    rng = random.Random(seed)
    fails = []
    for _ in range(cases):
        x, y, z = _deg0(p, rng), _deg0(p, rng), _deg0(p, rng)
        if bch(bch(x, y), z) != bch(x, bch(y, z)):
            fails.append((x, y, z))
    return fails


def exp_bch_suite(p, cases=100, seed=0):
    """exp(ad x)∘exp(ad y) = exp(ad bch(x, y)) on generators."""
    rng = random.Random(seed)
    fails = []
    for _ in range(cases):
        x, y = _deg0(p, rng), _deg0(p, rng)
        lhs = compose(exp_aut(x), exp_aut(y))
        rhs = exp_aut(bch(x, y))
        if any(lhs.images[g] != rhs.images[g] for g in range(len(p.names))):
            fails.append((x, y))
    return fails
