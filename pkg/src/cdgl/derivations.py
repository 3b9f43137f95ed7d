"""
Derivations of truncated free dgl's and their complexes.

A derivation of degree k is stored by its values on generators.  Basis
"slots" are pairs (g, o): the derivation sending generator g to the Lie basis
element o (of degree |g| + k) and every other generator to 0.  Truncation is
harmless here: derivations with values in L^{>N} form an ideal of Der L which
is stable under D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core.bch import BCHGroupElement, NilpotentLie
from .core.complexes import ChainComplex, DegreeWindow
from .core.linalg import (Echelon, addto, kernel_of_columns, lincomb,
                          solve_columns)
from .errors import (CdglError, DegreeError, MissingFiltration,
                     RuleIncompatible, ShapeError)
from .freelie import (CdglPresentation, GradedLieElement, SubDglInclusion,
                      tder)


class Derivation:
    """
    Degree-k derivation theta: S -> T along a carrier f (identity when S = T).

    ``values`` maps source generator indices to tensor dicts of the target.
    """

    def __init__(self, p, degree, values, vanishing=None, target=None, carrier=None):
        self.p = p
        self.target = target if target is not None else p
        self.degree = degree
        self.carrier = carrier            # CdglMorphism or None
        self.values = {}
        for g, v in values.items():
            if isinstance(g, str):
                g = p.index[g]
            if isinstance(v, GradedLieElement):
                v = v.terms
            v = {w: Fraction(c) for w, c in v.items() if c and len(w) <= self.target.N}
            if v:
                for w in v:
                    if sum(self.target.deg[x] for x in w) != p.deg[g] + degree:
                        raise DegreeError(f"value on {p.names[g]} has the wrong degree")
                self.values[g] = v
        self.vanishing = frozenset(vanishing) if vanishing else None
        if self.vanishing:
            bad = [p.names[g] for g in self.values if g in self.vanishing]
            if bad:
                raise CdglError(f"derivation required to vanish on {bad}")

    @classmethod
    def adjoint(cls, x: GradedLieElement):
        """ad_x: g -> [x, g]."""
        from .freelie import tbracket
        p = x.p
        vals = {g: tbracket(x.terms, {(g,): Fraction(1)}, p.N, p.deg) for g in range(len(p.names))}
        return cls(p, x.degree, vals)

    @classmethod
    def zero(cls, p, degree=0):
        return cls(p, degree, {})

    def _carrier_images(self):
        return None if self.carrier is None else self.carrier.images

    def apply_terms(self, terms):
        return tder(terms, self.values, self.degree, self.target.N, self.p.deg, self._carrier_images())

    def __call__(self, a):
        t = self.apply_terms(a.terms)
        return GradedLieElement(self.target, t, a.degree + self.degree if a.degree is not None else None)

    def value(self, name):
        g = self.p.index[name] if isinstance(name, str) else name
        return GradedLieElement(self.target, dict(self.values.get(g, {})), self.p.deg[g] + self.degree)

    def __add__(self, other):
        if other.degree != self.degree:
            raise DegreeError("adding derivations of different degrees")
        vals = {g: dict(v) for g, v in self.values.items()}
        for g, v in other.values.items():
            addto(vals.setdefault(g, {}), v)
        return Derivation(self.p, self.degree, vals, target=self.target, carrier=self.carrier)

    def __mul__(self, c):
        return Derivation(self.p, self.degree, {g: {w: c * x for w, x in v.items()} for g, v in self.values.items()},
                          target=self.target, carrier=self.carrier)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.degree == other.degree and self.values == other.values

    def is_zero(self):
        return not self.values

    def bracket(self, other):
        """[theta, eta] = theta eta - (-1)^{|theta||eta|} eta theta."""
        if self.carrier is not None or other.carrier is not None:
            raise CdglError("bracket is only defined for derivations of one algebra")
        sign = -1 if (self.degree % 2 and other.degree % 2) else 1
        vals = {}
        for g in range(len(self.p.names)):
            v = self.apply_terms(other.values.get(g, {}))
            addto(v, other.apply_terms(self.values.get(g, {})), -sign)
            if v:
                vals[g] = v
        return Derivation(self.p, self.degree + other.degree, vals)

    def __repr__(self):
        parts = [f"{self.p.names[g]} -> {GradedLieElement(self.target, v).render()}" for g, v in sorted(self.values.items())]
        return f"Derivation(deg {self.degree}; " + ", ".join(parts) + ")"


def der_apply(theta: Derivation, a: GradedLieElement) -> GradedLieElement:
    return theta(a)


def der_differential(theta: Derivation) -> Derivation:
    """D theta = d theta - (-1)^{|theta|} theta d, evaluated on generators."""
    S, T = theta.p, theta.target
    sign = -1 if theta.degree % 2 else 1
    vals = {}
    for g in range(len(S.names)):
        v = tder(theta.values.get(g, {}), T._d, -1, T.N, T.deg)
        addto(v, theta.apply_terms(S.d_image(g)), -sign)
        if v:
            vals[g] = v
    return Derivation(S, theta.degree - 1, vals, target=T, carrier=theta.carrier)


def relative_adjoint(x: GradedLieElement, inclusion) -> Derivation:
    """ad^M_x: zero on U, [x, v] on the remaining generators."""
    from .freelie import tbracket
    p = x.p
    U = inclusion.U if isinstance(inclusion, SubDglInclusion) else frozenset(p.index[n] for n in inclusion)
    vals = {g: tbracket(x.terms, {(g,): Fraction(1)}, p.N, p.deg)
            for g in range(len(p.names)) if g not in U}
    return Derivation(p, x.degree, vals, vanishing=U)


# ---------------------------------------------------------------------------

@dataclass
class GCondition:
    """
    Linear constraints on the linear part of degree-0 derivations.

    mode "full": only the generator filtration of the presentation;
    mode "filtration-stabilizer": the filtration all ⊃ U ⊃ 0 (linear parts
    must land in U, which is the Γ condition of the cell attachment case);
    mode "custom": ``constraints`` is a list of dicts {(gen name, gen name): coef},
    each a functional on the linear part that must vanish.
    """
    mode: str = "full"
    constraints: list = field(default_factory=list)

    def levels(self, p, U):
        if self.mode == "filtration-stabilizer":
            if U is None:
                raise MissingFiltration("the stabilizer condition needs a sub dgl")
            return (frozenset(range(len(p.names))), frozenset(U), frozenset())
        if p.filtration is None:
            raise MissingFiltration("connected derivation complexes need a generator filtration")
        return p.filtration


KINDS = ("Der", "DerM", "Der_f", "cDer", "cDerM")


class DerivationComplex:
    """
    The complexes Der L, Der^M L, Der_f(M, L) and the connected sub dgl's
    cDer L, cDer^M L (degree 0 cut down to D-cycles satisfying the
    filtration/G condition, negative degrees dropped).
    """

    def __init__(self, p: CdglPresentation, kind="DerM", g: GCondition = None, window=None,
                 inclusion=None, carrier=None, source=None):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.p = p                        # target algebra
        self.source = source or (carrier.source if carrier is not None else p)
        self.carrier = carrier
        self.window = window or p.window
        self.gcond = g or GCondition()
        if inclusion is None and kind in ("DerM", "cDerM", "Der_f") and carrier is None:
            inclusion = p.inclusion()
        self.inclusion = inclusion
        S = self.source
        if kind in ("DerM", "cDerM"):
            self.slot_gens = [g_ for g_ in range(len(S.names)) if g_ not in inclusion.U]
        elif kind == "Der_f" and carrier is None:
            self.slot_gens = sorted(inclusion.U)      # Der_j(M, L)
        else:
            self.slot_gens = list(range(len(S.names)))
        self.connected = kind in ("cDer", "cDerM")
        if self.connected:
            self.levels = self.gcond.levels(S, inclusion.U if inclusion else None)
        self._slots = {}
        self._pos = {}
        self._dcache = {}
        self._complex = None
        self._deg0 = None

    # -- slots -------------------------------------------------------------
    def slots(self, k):
        if k not in self._slots:
            S, T = self.source, self.p
            out = []
            for g in self.slot_gens:
                for o in T.basis.indices(S.deg[g] + k):
                    out.append((g, o))
            self._slots[k] = out
            self._pos[k] = {s: i for i, s in enumerate(out)}
        return self._slots[k]

    def position(self, k, slot):
        self.slots(k)
        return self._pos[k][slot]

    def element(self, vec, k) -> Derivation:
        """Derivation from a dict over slot positions of degree k."""
        T = self.p
        vals = {}
        sl = self.slots(k)
        for i, c in vec.items():
            g, o = sl[i]
            addto(vals.setdefault(g, {}), T.basis.vec[o], c)
        vanish = self.inclusion.U if self.kind in ("DerM", "cDerM") else None
        return Derivation(self.source, k, vals, vanishing=vanish, target=T, carrier=self.carrier)

    def vector(self, theta: Derivation):
        k = theta.degree
        self.slots(k)
        out = {}
        for g, v in theta.values.items():
            for o, c in self.p.coords(v).items():
                key = (g, o)
                if key not in self._pos[k]:
                    raise CdglError(f"derivation has a value outside this complex ({self.source.names[g]})")
                out[self._pos[k][key]] = c
        return out

    # -- differential ------------------------------------------------------
    def _d_slot(self, k, i):
        key = (k, i)
        r = self._dcache.get(key)
        if r is None:
            theta = self.element({i: Fraction(1)}, k)
            r = self.vector(der_differential(theta))
            self._dcache[key] = r
        return r

    def D(self, vec, k):
        return lincomb((c, self._d_slot(k, i)) for i, c in vec.items())

    def bracket_vectors(self, u, ku, v, kv):
        a = self.element(u, ku)
        b = self.element(v, kv)
        return self.vector(a.bracket(b))

    # -- degree 0 of the connected kinds -------------------------------------
    def _linear_ok_functionals(self):
        """Functionals (dicts over degree-0 slot positions) that must vanish."""
        S, T = self.source, self.p
        out = []
        lv = self.levels
        for pos, (g, o) in enumerate(self.slots(0)):
            if T.basis.length[o] != 1:
                continue
            h = T.basis.content[o][0]
            glevel = max(i for i, s in enumerate(lv) if g in s)
            allowed = lv[glevel + 1] if glevel + 1 < len(lv) else frozenset()
            if h not in allowed:
                out.append({pos: Fraction(1)})
        for c in self.gcond.constraints if self.gcond.mode == "custom" else []:
            f = {}
            for (gn, hn), coef in c.items():
                g, h = S.index[gn], T.index[hn]
                o = next(i for i in T.basis.by_content[(h,)])
                f[self.position(0, (g, o))] = Fraction(coef)
            out.append(f)
        return out

    def degree0_basis(self):
        """Basis (dicts over degree-0 slots) of the degree-0 part of a connected kind."""
        if self._deg0 is None:
            n0 = len(self.slots(0))
            cols = []
            for i in range(n0):
                cols.append(self._d_slot(0, i))
            funcs = self._linear_ok_functionals()
            # kernel of (D_0, functionals) stacked
            stacked = []
            for i in range(n0):
                col = {("d", k): c for k, c in cols[i].items()}
                for j, f in enumerate(funcs):
                    if i in f:
                        col[("f", j)] = f[i]
                stacked.append(col)
            self._deg0 = kernel_of_columns(stacked)
        return self._deg0

    def contains_degree0(self, vec):
        """Membership test for the degree-0 part of a connected kind."""
        if self.D(vec, 0):
            return False
        for f in self._linear_ok_functionals():
            if sum((c * vec.get(i, 0) for i, c in f.items()), Fraction(0)):
                return False
        return True

    # -- chain complex -------------------------------------------------------
    def chain_complex(self) -> ChainComplex:
        if self._complex is not None:
            return self._complex
        labels, diff = {}, {}
        w = self.window
        for k in w.degrees():
            if self.connected and k < 0:
                labels[k] = []
                continue
            if self.connected and k == 0:
                b0 = self.degree0_basis()
                labels[0] = [("z", i) for i in range(len(b0))]
                diff[0] = [{} for _ in b0]
                continue
            sl = self.slots(k)
            labels[k] = sl
            cols = []
            for i in range(len(sl)):
                img = self._d_slot(k, i)
                if self.connected and k == 1:
                    sol = solve_columns(self.degree0_basis(), img) if img else {}
                    if sol is None:
                        raise RuleIncompatible("D of a degree-1 derivation leaves the degree-0 part")
                    img = sol
                elif k - 1 < w.min_degree:
                    img = {}
                cols.append(img)
            diff[k] = cols
        self._complex = ChainComplex(labels, diff, w)
        return self._complex

    def betti(self, k):
        return self.chain_complex().betti(k)

    def check_square_zero(self):
        return self.chain_complex().check_square_zero()

    # -- H_0 as a group ------------------------------------------------------
    def h0_algebra(self):
        """Degree-0 cycles modulo boundaries as a NilpotentLie (slot coordinates)."""
        cc = self.chain_complex()
        if self.connected:
            b0 = self.degree0_basis()
            bounds = [lincomb((c, b0[j]) for j, c in col.items()) for col in cc.diff.get(1, [])]
        else:
            bounds = [self._d_slot(1, i) for i in range(len(self.slots(1)))]
        return NilpotentLie(lambda u, v: self.bracket_vectors(u, 0, v, 0), bounds, name=self.kind)

    def h0_group(self):
        alg = self.h0_algebra()
        reps = self.h0_representatives()
        return alg, [BCHGroupElement(alg, r) for r in reps]

    def h0_representatives(self):
        cc = self.chain_complex()
        h = cc.homology(0)
        if self.connected:
            b0 = self.degree0_basis()
            return [lincomb((c, b0[j]) for j, c in z.items()) for z in h.representatives]
        return h.representatives

    def h0_nilpotency_class(self):
        """Nilpotency class of the Lie algebra H_0 (0 when H_0 = 0)."""
        alg = self.h0_algebra()
        reps = self.h0_representatives()
        if not reps:
            return 0
        cls = 1
        current = reps
        while True:
            nxt = []
            ech = Echelon()
            for a in reps:
                for b in current:
                    v = alg.normal_form(alg.bracket(a, b))
                    if v and ech.add(v):
                        nxt.append(v)
            if not nxt:
                return cls
            cls += 1
            current = nxt
            if cls > 64:
                raise CdglError("H_0 is not nilpotent within the cap")


def build_derivation_complex(p, kind="DerM", g=None, window=None, inclusion=None, carrier=None):
    if kind in ("cDer", "cDerM") and (g is None or g.mode != "filtration-stabilizer") and p.filtration is None:
        raise MissingFiltration("connected derivation complexes need a generator filtration")
    return DerivationComplex(p, kind, g, window, inclusion, carrier)


@dataclass
class DerHomology:
    degree: int
    betti: int
    group_dimension: int = None
    nilpotency_class: int = None


def der_homology(c: DerivationComplex, k: int) -> DerHomology:
    b = c.betti(k)
    if k != 0:
        return DerHomology(k, b)
    return DerHomology(0, b, b, c.h0_nilpotency_class())


# ---------------------------------------------------------------------------

def lie_chain_complex(p: CdglPresentation, window=None) -> ChainComplex:
    """(L, d) on the Lie basis in a degree window."""
    window = window or p.window
    B = p.basis
    labels, diff = {}, {}
    for n in window.degrees():
        idx = B.indices(n)
        labels[n] = idx
        below = {b: i for i, b in enumerate(B.indices(n - 1))} if n - 1 >= window.min_degree else None
        cols = []
        for i in idx:
            if below is None:
                cols.append({})
            else:
                cols.append({below[b]: c for b, c in p.d_idx(i).items()})
        diff[n] = cols
    return ChainComplex(labels, diff, window)


@dataclass
class PsiCertificate:
    n: int
    cell: str
    degrees: list
    bijective: bool
    chain_map: bool
    failures: list

    @property
    def ok(self):
        return self.bijective and self.chain_map


def psi_iso(p: CdglPresentation, inclusion=None, window=None) -> PsiCertificate:
    """
    psi: Der^M L -> L shifted by n, theta -> theta(x), for L = M with one
    extra generator x of degree n.  Checks bijectivity on slot bases and
    psi(D theta) = d(psi theta) on every basis element in the window.
    """
    inclusion = inclusion or p.inclusion()
    if len(inclusion.V) != 1:
        raise ShapeError("psi needs exactly one generator outside the sub dgl")
    (x,) = tuple(inclusion.V)
    n = p.deg[x]
    c = DerivationComplex(p, "DerM", inclusion=inclusion, window=window)
    window = c.window
    failures = []
    bij = True
    for k in window.degrees():
        sl = c.slots(k)
        targets = p.basis.indices(k + n)
        if sorted(o for _, o in sl) != sorted(targets):
            bij = False
        for i, (g, o) in enumerate(sl):
            theta = c.element({i: Fraction(1)}, k)
            lhs = der_differential(theta).value(x)
            rhs = theta.value(x).d()
            if lhs != rhs:
                failures.append((k, p.basis.render(o)))
    return PsiCertificate(n, p.names[x], list(window.degrees()), bij, not failures, failures)


def psi_transport(p, k, inclusion=None, window=None):
    """Betti number of Der^M L in degree k computed through psi as H_{k+n}(L)."""
    inclusion = inclusion or p.inclusion()
    (x,) = tuple(inclusion.V)
    n = p.deg[x]
    w = window or p.window
    lc = lie_chain_complex(p, DegreeWindow(w.min_degree + n, w.max_degree + n))
    return lc.betti(k + n)


def solve_primitive(theta: Derivation, c: DerivationComplex = None, ansatz=None):
    """
    A degree-1 derivation eta with D eta = theta, or None.

    ``ansatz`` is an optional list of degree-1 derivations; the solution is
    then a combination of them (earlier ones preferred).  Without it the
    unknowns are the slot basis of the complex, free variables set to zero.
    Raises CdglError when theta is not a D-cycle.
    """
    if der_differential(theta).values:
        raise CdglError("not a D-cycle")
    if not theta.values:
        return Derivation(theta.p, theta.degree + 1, {}, target=theta.target)
    if ansatz is None:
        c = c or DerivationComplex(theta.p, "DerM")
        k = theta.degree + 1
        cols = [c._d_slot(k, i) for i in range(len(c.slots(k)))]
        target = c.vector(theta)
        sol = solve_columns(cols, target)
        return None if sol is None else c.element(sol, k)
    images = [der_differential(e) for e in ansatz]
    keys = {}

    def flat(d):
        out = {}
        for g, v in d.values.items():
            for w, x in v.items():
                out[keys.setdefault((g, w), (g, len(w), w))] = x
        return out

    cols = [flat(e) for e in images]
    sol = solve_columns(cols, flat(theta))
    if sol is None:
        return None
    eta = Derivation(theta.p, theta.degree + 1, {}, target=theta.target)
    for j, x in sorted(sol.items()):
        eta = eta + ansatz[j] * x
    return eta


def solve_primitive_coefficients(theta, ansatz):
    """Coefficients (one per ansatz element) of the primitive, or None."""
    images = [der_differential(e) for e in ansatz]

    def flat(d):
        return {(g, w): x for g, v in d.values.items() for w, x in v.items()}

    sol = solve_columns([flat(e) for e in images], flat(theta))
    if sol is None:
        return None
    return [sol.get(j, Fraction(0)) for j in range(len(ansatz))]
