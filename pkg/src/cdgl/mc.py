"""
Maurer-Cartan elements, the gauge action, BCH and components.

All series are finite at truncation: brackets with a degree-0 element raise
word length, so ad_x is nilpotent on L/L^{N+1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .core.bch import bch_series
from .core.complexes import ChainComplex, DegreeWindow
from .core.linalg import addto, kernel_of_columns, lincomb, scaled, solve_columns
from .errors import CdglError, DegreeError, ResidualNonzero
from .freelie import (CdglPresentation, GradedLieElement, apply_differential,
                      tbracket, tder, tmorph)

SERIES_CAP = 256


def _series(x, v, br, first_coef=lambda i: Fraction(1, factorial(i))):
    """sum_i first_coef(i) ad_x^i (v) for dict vectors."""
    out = {}
    term = v
    i = 0
    while term:
        addto(out, term, first_coef(i))
        i += 1
        if i > SERIES_CAP:
            raise CdglError("ad_x is not nilpotent on this element")
        term = br(x, term)
    return out


def gauge_vectors(x, a, dx, br):
    """x G a = e^{ad_x}(a) - ((e^{ad_x} - 1)/ad_x)(dx) on dict vectors."""
    out = _series(x, a, br)
    addto(out, _series(x, dx, br, lambda i: Fraction(1, factorial(i + 1))), -1)
    return out


# ---------------------------------------------------------------------------

def mc_residual(p: CdglPresentation, a: GradedLieElement) -> GradedLieElement:
    """da + 1/2 [a, a]."""
    if a.terms and a.degree != -1:
        raise DegreeError("MC elements have degree -1")
    r = dict(apply_differential(p, a).terms)
    addto(r, tbracket(a.terms, a.terms, p.N, p.deg), Fraction(1, 2))
    return GradedLieElement(p, r, -2)


@dataclass
class MCElement:
    value: GradedLieElement
    residual: GradedLieElement = field(default=None)

    def __post_init__(self):
        if self.residual is None:
            self.residual = mc_residual(self.value.p, self.value)
        if self.residual:
            raise ResidualNonzero("not a Maurer-Cartan element at this truncation", self.residual)

    @property
    def p(self):
        return self.value.p


def _as_value(a):
    return a.value if isinstance(a, MCElement) else a


def gauge_act(x: GradedLieElement, a) -> GradedLieElement:
    a = _as_value(a)
    if x.terms and x.degree != 0:
        raise DegreeError("gauge parameters have degree 0")
    p = x.p
    br = lambda u, v: tbracket(u, v, p.N, p.deg)
    dx = apply_differential(p, x).terms
    return GradedLieElement(p, gauge_vectors(x.terms, a.terms, dx, br), -1)


def bch(x: GradedLieElement, y: GradedLieElement) -> GradedLieElement:
    for e in (x, y):
        if e.terms and e.degree != 0:
            raise DegreeError("bch takes degree-0 elements")
    p = x.p
    br = lambda u, v: tbracket(u, v, p.N, p.deg)
    return GradedLieElement(p, bch_series(x.terms, y.terms, br, max_length=p.N), 0)


class PerturbedDifferential:
    """d_a = d + ad_a for an MC element a."""

    def __init__(self, p, a):
        self.p = p
        self.a = MCElement(_as_value(a)) if not isinstance(a, MCElement) else a

    def __call__(self, v: GradedLieElement) -> GradedLieElement:
        out = apply_differential(self.p, v) + self.a.value.bracket(v)
        return GradedLieElement(self.p, out.terms, v.degree - 1 if v.degree is not None else None)

    def coords(self, v):
        """d_a on basis coordinates."""
        p = self.p
        out = p.d_coords(v)
        addto(out, p.bracket_coords(self.a.value.coords(), v))
        return out

    def square_is_zero(self):
        p = self.p
        for i in range(len(p.basis)):
            if self.coords(self.coords({i: Fraction(1)})):
                return False
        return True


@dataclass
class ComponentDgl:
    presentation: CdglPresentation
    mc: MCElement
    differential: PerturbedDifferential
    degree0: list            # basis (coordinate dicts) of ker d_a in degree 0
    complex: ChainComplex


def component_dgl(p: CdglPresentation, a, window=None) -> ComponentDgl:
    """L^a: degree 0 is ker d_a, positive degrees unchanged, negative dropped."""
    window = window or DegreeWindow(0, max(1, p.window.max_degree))
    pd = PerturbedDifferential(p, a)
    B = p.basis
    d0 = B.indices(0)
    zero_cols = [pd.coords({i: Fraction(1)}) for i in d0]
    ker = [{d0[j]: c for j, c in k.items()} for k in kernel_of_columns(zero_cols)]
    labels, diff = {}, {}
    for n in window.degrees():
        if n < 0:
            labels[n] = []
            continue
        if n == 0:
            labels[0] = [("z", i) for i in range(len(ker))]
            diff[0] = [{} for _ in ker]
            continue
        idx = B.indices(n)
        labels[n] = idx
        below = B.indices(n - 1)
        cols = []
        for i in idx:
            img = pd.coords({i: Fraction(1)})
            if n - 1 == 0:
                # express in the kernel basis
                sol = solve_columns(ker, img) if img else {}
                if sol is None:
                    raise CdglError("d_a of a degree-1 element is not a d_a-cycle")
                cols.append(sol)
            else:
                pos = {b: k for k, b in enumerate(below)}
                cols.append({pos[b]: c for b, c in img.items()})
        diff[n] = cols
    return ComponentDgl(p, pd.a, pd, ker, ChainComplex(labels, diff, window))


# ---------------------------------------------------------------------------

@dataclass
class WitnessResult:
    witness: GradedLieElement = None
    iterations: int = 0
    obstruction_length: int = None
    obstruction: GradedLieElement = None

    @property
    def found(self):
        return self.witness is not None


def find_gauge_witness(a, b, max_length=None, max_iterations=64, report=False):
    """
    Search for x of degree 0 with x G a = b at truncation.

    The search repeatedly linearises the gauge action at the current
    a' = x G a: with residual r = b - a' of minimal word length m it solves
    -d_{a'} delta = r on lengths <= m (delta has lengths >= t, t lowered from
    floor(m/2)+1 to 1 until the system is consistent) and updates
    x <- bch(delta, x).  Returns None (or a WitnessResult when ``report``)
    when some stage is inconsistent.
    """
    a, b = _as_value(a), _as_value(b)
    p = a.p
    N = p.N if max_length is None else min(max_length, p.N)
    B = p.basis
    deg0 = B.indices(0, N)
    x = p.zero(0)
    res = WitnessResult()
    for it in range(max_iterations):
        cur = gauge_act(x, a)
        r = b - cur
        r = GradedLieElement(p, {w: c for w, c in r.terms.items() if len(w) <= N}, -1)
        if not r:
            res.witness, res.iterations = x, it
            return res if report else x
        m = r.min_length()
        rc = {i: c for i, c in r.coords().items() if B.length[i] <= m}
        pd_a = cur.coords()

        def lin(i):
            v = p.d_coords({i: Fraction(1)})
            addto(v, p.bracket_coords(pd_a, {i: Fraction(1)}))
            return {k: c for k, c in v.items() if B.length[k] <= m}

        delta = None
        for t in range(m // 2 + 1, 0, -1):
            unknowns = [i for i in deg0 if t <= B.length[i] <= m]
            cols = [lin(i) for i in unknowns]
            sol = solve_columns(cols, scaled(rc, -1))
            if sol is not None:
                delta = {unknowns[j]: c for j, c in sol.items()}
                break
        if delta is None:
            res.obstruction_length = m
            res.obstruction = GradedLieElement(p, {w: c for w, c in r.terms.items() if len(w) == m}, -1)
            res.iterations = it
            return res if report else None
        x = bch(GradedLieElement.from_coords(p, delta, 0), x)
    res.iterations = max_iterations
    return res if report else None


# ---------------------------------------------------------------------------

def exp_aut(theta):
    """
    The automorphism e^theta, returned as a CdglMorphism L -> L.

    ``theta`` is a degree-0 Derivation or a degree-0 element x (read as ad_x).
    """
    from .derivations import Derivation
    from .freelie import CdglMorphism
    if isinstance(theta, GradedLieElement):
        if theta.terms and theta.degree != 0:
            raise DegreeError("exp needs a degree-0 element")
        theta = Derivation.adjoint(theta)
    if theta.degree != 0:
        raise DegreeError("exp needs a degree-0 derivation")
    p = theta.p
    images = {}
    for g, name in enumerate(p.names):
        out = {}
        term = {(g,): Fraction(1)}
        i = 0
        while term:
            addto(out, term, Fraction(1, factorial(i)))
            i += 1
            if i > SERIES_CAP:
                raise CdglError("derivation is not nilpotent at this truncation")
            term = tder(term, theta.values, 0, p.N, p.deg)
        images[name] = GradedLieElement(p, out, p.deg[g])
    return CdglMorphism(p, p, images, check=False)


def compose(f, g):
    """f o g for endomorphisms given as CdglMorphism."""
    from .freelie import CdglMorphism
    p = g.source
    images = {n: GradedLieElement(f.target, tmorph(g.images[i], f.images, f.target.N), p.deg[i])
              for i, n in enumerate(p.names)}
    return CdglMorphism(p, f.target, images, check=False)
