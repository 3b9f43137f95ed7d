"""
The Chevalley-Eilenberg coalgebra C(L) = (Λ sL, d1 + d2), convolution dgl's
Hom(C(L'), L) and the twisted products built on them.

Words of C(L') are sorted tuples of basis indices of L' (a letter may repeat
only when its suspension has even degree).  The word () is the counit.
Truncation: a word has total length = sum of the bracket lengths of its
letters; a key (w, o) of Hom is kept when length(o) >= length(w) and
length(o) <= N.  This weight condition is preserved by the differential,
the bracket and perturbation by phi∘q, so every space below is finite.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .core.complexes import DegreeWindow
from .core.linalg import Echelon, addto, lincomb
from .core.signs import sort_sign
from .dgl import FiniteDgl
from .errors import CdglError, DegreeError, ResidualNonzero, VariantMismatch
from .freelie import CdglPresentation, GradedLieElement, tbracket, tder

COHERENT = "coherent"
PLUS = "plus"


class CECoalgebra:
    """
    Words over ``letters`` (basis indices of S) of total length <= N and
    wedge length <= W.  ``d2_sign`` selects d2(sv ∧ sw) = ∓(-1)^{|sv|} s[v, w]:
    "coherent" takes the minus sign (then q is Maurer-Cartan), "plus" the other one.
    """

    def __init__(self, S: CdglPresentation, letters=None, N=None, W=None, d2_sign=COHERENT):
        if d2_sign not in (COHERENT, PLUS):
            raise ValueError("d2_sign is 'coherent' or 'plus'")
        self.S = S
        self.N = min(N or S.N, S.N)
        self.W = W or self.N
        self.d2_sign = d2_sign
        B = S.basis
        self.letters = sorted(letters) if letters is not None else list(range(len(B)))
        self.letter_set = frozenset(self.letters)
        self.sd = {a: B.degree[a] + 1 for a in range(len(B))}
        self._len = B.length
        self._d = {}
        self._merge = {}
        self._reverse = None
        self.words = self._enumerate()

    # -- words ---------------------------------------------------------------
    def length(self, w):
        return sum(self._len[a] for a in w)

    def degree(self, w):
        return sum(self.sd[a] for a in w)

    def _enumerate(self):
        out = [()]
        L = self.letters

        def rec(start, word, total):
            for j in range(start, len(L)):
                a = L[j]
                t = total + self._len[a]
                if t > self.N:
                    continue
                w = word + (a,)
                out.append(w)
                if len(w) < self.W:
                    rec(j if self.sd[a] % 2 == 0 else j + 1, w, t)

        rec(0, (), 0)
        return out

    def canonical(self, letters):
        """(sorted word, Koszul sign) or (None, 0) when an odd letter repeats."""
        w, s = sort_sign(tuple(letters), lambda a: self.sd[a])
        for x, y in zip(w, w[1:]):
            if x == y and self.sd[x] % 2:
                return None, 0
        return w, s

    def merge(self, w1, w2):
        """(w, kappa) with w1 ⊗ w2 appearing in Δw with coefficient kappa."""
        key = (w1, w2)
        r = self._merge.get(key)
        if r is None:
            w, s = self.canonical(w1 + w2)
            if w is None:
                r = (None, 0)
            else:
                k = s
                for a in set(w1) & set(w2):
                    k *= comb(w.count(a), w1.count(a))
                r = (w, k)
            self._merge[key] = r
        return r

    def _ok(self, w):
        return w is not None and self.length(w) <= self.N and len(w) <= self.W

    def d(self, w):
        """Coalgebra differential of a word, as {word: coef}."""
        r = self._d.get(w)
        if r is not None:
            return r
        S = self.S
        out = {}
        prefix = 0
        for i, a in enumerate(w):
            # d1(sa) = -s(da) with the Koszul sign of the preceding letters
            sgn = -1 if prefix % 2 else 1
            for b, c in S.d_idx(a).items():
                nw, s = self.canonical(w[:i] + (b,) + w[i + 1:])
                if self._ok(nw):
                    out[nw] = out.get(nw, 0) - sgn * s * c
            prefix += self.sd[a]
        eps = -1 if self.d2_sign == COHERENT else 1
        sd = [self.sd[a] for a in w]
        for i in range(len(w)):
            for j in range(i + 1, len(w)):
                before_i = sum(sd[:i])
                before_j = sum(sd[:j]) - sd[i]
                s0 = -1 if (sd[i] * before_i + sd[j] * before_j) % 2 else 1
                s0 *= eps * (-1 if sd[i] % 2 else 1)
                rest = w[:i] + w[i + 1:j] + w[j + 1:]
                for b, c in S.bracket_idx(w[i], w[j]).items():
                    nw, s = self.canonical((b,) + rest)
                    if self._ok(nw):
                        out[nw] = out.get(nw, 0) + s0 * s * c
        out = {k: Fraction(v) for k, v in out.items() if v}
        self._d[w] = out
        return out

    def reverse(self):
        """word -> [(source word, coef)] with coef = coefficient of word in d(source)."""
        if self._reverse is None:
            rev = defaultdict(list)
            for u in self.words:
                for w, c in self.d(u).items():
                    rev[w].append((u, c))
            self._reverse = dict(rev)
        return self._reverse

    def check_square_zero(self):
        bad = []
        for w in self.words:
            if lincomb((c, self.d(u)) for u, c in self.d(w).items()):
                bad.append(w)
        return bad


def ce_coalgebra(S, letters=None, N=None, W=None, d2_sign=COHERENT):
    return CECoalgebra(S, letters, N, W, d2_sign)


# ---------------------------------------------------------------------------

WORD_RULES = ("none", "empty", "all", "reduced", "HomM", "HomCbarM")


class TwistedDgl(FiniteDgl):
    """
    A sub dgl (or twisted product) of  Hom(C(S), T) ×̃ Der T ×̃ sT  on keys
        ("H", word, o)   map sending the word to the basis element o of T,
        ("D", g, o)      derivation sending generator g to o,
        ("S", o)         suspension of o.
    Options choose the coordinate subspace:
        word_rule   none | empty | all | reduced | HomM | HomCbarM
        output_rule all | M (outputs inside the sub algebra)
        der         None | "Der" | "DerM"
        s_part      include sT (with D sx = -s dx + ad_x, minus x̂ when s_hat)
        perturbation  a vector z; the differential becomes D + [z, -]
        relative_tilde  use x̂ ↦ (dx)^ - (-1)^{|x|} ad^M_x∘q on the word ()
        connected   degree-0 derivations cut to a given subspace, negatives dropped
    """

    def __init__(self, T: CdglPresentation, coalgebra: CECoalgebra = None, *, word_rule="none",
                 output_rule="all", der=None, inclusion=None, s_part=False, s_hat=False,
                 perturbation=None, relative_tilde=False, degree0=None, name="twisted"):
        if word_rule not in WORD_RULES:
            raise ValueError(f"unknown word rule {word_rule!r}")
        self.T = T
        self.C = coalgebra
        if coalgebra is None and word_rule not in ("none", "empty"):
            raise CdglError("a coalgebra is needed for Hom components")
        self.word_rule = word_rule
        self.output_rule = output_rule
        self.der = der
        self.inclusion = inclusion if inclusion is not None else (T.inclusion() if T.sub is not None else None)
        self.s_part = s_part
        self.s_hat = s_hat
        self.z = dict(perturbation or {})
        self.relative_tilde = relative_tilde
        self.degree0 = degree0
        self.name = name
        self.N = T.N if coalgebra is None else min(T.N, coalgebra.N)
        B = T.basis
        self._out_by_deg = defaultdict(list)
        for o in range(len(B)):
            if output_rule == "M" and not self.inclusion.in_sub(o):
                continue
            self._out_by_deg[B.degree[o]].append(o)
        if der == "DerM":
            self.der_gens = sorted(self.inclusion.V)
        elif der == "Der":
            self.der_gens = list(range(len(T.names)))
        else:
            self.der_gens = []
        self._dergen_set = frozenset(self.der_gens)
        self._mletters = None
        if word_rule in ("HomM", "HomCbarM"):
            self._mletters = frozenset(i for i in range(len(B)) if self.inclusion.in_sub(i))
        self._words_by_deg = defaultdict(list)
        if coalgebra is not None:
            for w in coalgebra.words:
                if self.word_allowed(w):
                    self._words_by_deg[coalgebra.degree(w)].append(w)
        elif word_rule == "empty":
            self._words_by_deg[0].append(())
        self._keys = {}
        self._dcache = {}
        self._bcache = {}
        self._thcache = {}

    # -- membership ------------------------------------------------------------
    def word_allowed(self, w):
        r = self.word_rule
        if r == "none":
            return False
        if r == "empty":
            return w == ()
        if r == "all":
            return True
        if r == "reduced":
            return w != ()
        nonm = any(a not in self._mletters for a in w)
        if r == "HomM":
            return nonm
        return w == () or nonm      # HomCbarM

    def has_key(self, key):
        t = key[0]
        B = self.T.basis
        if t == "H":
            _, w, o = key
            if not self.word_allowed(w) or o not in self._out_set():
                return False
            lw = self.C.length(w) if self.C is not None else 0
            return lw <= B.length[o] <= self.N
        if t == "D":
            _, g, o = key
            if g not in self._dergen_set:
                return False
            if self.degree0 is not None and self.degree(key) < 0:
                return False
            return True
        return self.s_part

    def _out_set(self):
        s = self.__dict__.get("_outset")
        if s is None:
            s = frozenset(o for v in self._out_by_deg.values() for o in v)
            self._outset = s
        return s

    def degree(self, key):
        B = self.T.basis
        t = key[0]
        if t == "H":
            return B.degree[key[2]] - (self.C.degree(key[1]) if self.C is not None else 0)
        if t == "D":
            return B.degree[key[2]] - self.T.deg[key[1]]
        return B.degree[key[1]] + 1

    def basis_keys(self, k):
        r = self._keys.get(k)
        if r is not None:
            return r
        B = self.T.basis
        out = []
        for sdeg, words in sorted(self._words_by_deg.items()):
            outs = self._out_by_deg.get(k + sdeg, ())
            for w in words:
                lw = self.C.length(w) if self.C is not None else 0
                for o in outs:
                    if lw <= B.length[o] <= self.N:
                        out.append(("H", w, o))
        if not (self.degree0 is not None and k < 0):
            for g in self.der_gens:
                for o in B.indices(k + self.T.deg[g]):
                    out.append(("D", g, o))
        if self.s_part:
            for o in B.indices(k - 1):
                out.append(("S", o))
        self._keys[k] = out
        return out

    def subspace(self, k):
        if self.degree0 is not None and k == 0 and self.der_gens:
            H = [{key: Fraction(1)} for key in self.basis_keys(0) if key[0] != "D"]
            return H + list(self.degree0)
        return None

    # -- derivation action -------------------------------------------------------
    def theta_on(self, g, ot, o):
        """Coordinates of theta(e_o) for theta = (g -> e_ot)."""
        key = (g, ot, o)
        r = self._thcache.get(key)
        if r is None:
            T = self.T
            B = T.basis
            k = B.degree[ot] - T.deg[g]
            r = T.coords(tder(B.vec[o], {g: B.vec[ot]}, k, T.N, T.deg))
            self._thcache[key] = r
        return r

    def adm_on(self, x, a):
        """Coordinates of ad^M_x(e_a) (ad_x when there is no sub algebra)."""
        T = self.T
        B = T.basis
        U = self.inclusion.U if self.inclusion is not None else frozenset()
        xv = B.vec[x]
        vals = {g: tbracket(xv, {(g,): Fraction(1)}, T.N, T.deg) for g in range(len(T.names)) if g not in U}
        return T.coords(tder(B.vec[a], vals, B.degree[x], T.N, T.deg))

    # -- differential --------------------------------------------------------------
    def D_key(self, key):
        r = self._dcache.get(key)
        if r is not None:
            return r
        r = self._D0(key)
        if self.z and not (self.relative_tilde and key[0] == "H" and key[1] == ()):
            for zk, zc in self._z_partners(key):
                addto(r, self._bracket(zk, key), zc)
        r = self._truncate(r)
        self._dcache[key] = r
        return r

    def _truncate(self, vec):
        """Drop Hom outputs longer than N when N is below the target truncation."""
        if self.N >= self.T.N:
            return vec
        ln = self.T.basis.length
        return {k: c for k, c in vec.items() if k[0] != "H" or ln[k[2]] <= self.N}

    def _z_partners(self, key):
        """Terms of z whose bracket with key can be nonzero at truncation."""
        if key[0] != "H":
            return self.z.items()
        if not hasattr(self, "_zbylen"):
            B = self.T.basis
            self._zbylen = defaultdict(list)
            self._znonh = []
            for zk, zc in sorted(self.z.items(), key=lambda t: repr(t[0])):
                if zk[0] == "H":
                    self._zbylen[B.length[zk[2]]].append((zk, zc))
                else:
                    self._znonh.append((zk, zc))
        room = self.N - self.T.basis.length[key[2]]
        out = list(self._znonh)
        for ln in range(1, room + 1):
            out.extend(self._zbylen.get(ln, ()))
        return out

    def _D0(self, key):
        T = self.T
        B = T.basis
        out = {}
        t = key[0]
        if t == "H":
            _, w, o = key
            if self.relative_tilde and w == ():
                for o2, c in T.d_idx(o).items():
                    addto(out, {("H", (), o2): c})
                s = -1 if B.degree[o] % 2 else 1
                for a in self.C.letters:
                    for o2, c in self.adm_on(o, a).items():
                        addto(out, {("H", (a,), o2): c}, -s)
                return out
            for o2, c in T.d_idx(o).items():
                out[("H", w, o2)] = out.get(("H", w, o2), 0) + c
            sf = -1 if self.degree(key) % 2 else 1
            if self.C is not None:
                for u, c in self.C.reverse().get(w, ()):
                    k2 = ("H", u, o)
                    out[k2] = out.get(k2, 0) - sf * c
        elif t == "D":
            _, g, o = key
            k = B.degree[o] - T.deg[g]
            for o2, c in T.d_idx(o).items():
                out[("D", g, o2)] = out.get(("D", g, o2), 0) + c
            s = -1 if k % 2 else 1
            for g2 in range(len(T.names)):
                dg = T.d_image(g2)
                if not dg:
                    continue
                v = tder(dg, {g: B.vec[o]}, k, T.N, T.deg)
                if v:
                    for o2, c in T.coords(v).items():
                        out[("D", g2, o2)] = out.get(("D", g2, o2), 0) - s * c
        else:
            _, o = key
            for o2, c in T.d_idx(o).items():
                out[("S", o2)] = out.get(("S", o2), 0) - c
            # ad_x on every generator
            for g in range(len(T.names)):
                for o2, c in T.bracket_idx(o, B.by_content[(g,)][0]).items():
                    out[("D", g, o2)] = out.get(("D", g, o2), 0) + c
            if self.s_hat:
                out[("H", (), o)] = out.get(("H", (), o), 0) - 1
        return {k: Fraction(c) for k, c in out.items() if c}

    # -- bracket -------------------------------------------------------------------
    def bracket_keys(self, a, b):
        key = (a, b)
        r = self._bcache.get(key)
        if r is None:
            r = self._truncate(self._bracket(a, b))
            self._bcache[key] = r
        return r

    def _bracket(self, a, b):
        T = self.T
        ta, tb = a[0], b[0]
        if ta == "H" and tb == "H":
            _, w1, o1 = a
            _, w2, o2 = b
            w, kappa = self.C.merge(w1, w2) if self.C is not None else ((), 1)
            if w is None or not kappa:
                return {}
            if self.C is not None and (self.C.length(w) > self.C.N or len(w) > self.C.W):
                return {}
            s = kappa
            if (self.degree(b) * (self.C.degree(w1) if self.C is not None else 0)) % 2:
                s = -s
            return {("H", w, o): s * c for o, c in T.bracket_idx(o1, o2).items()}
        if ta == "D" and tb == "H":
            _, g, ot = a
            _, w, o = b
            return {("H", w, o2): c for o2, c in self.theta_on(g, ot, o).items()}
        if ta == "H" and tb == "D":
            return self._flip(b, a)
        if ta == "D" and tb == "D":
            _, g1, o1 = a
            _, g2, o2 = b
            s = -1 if (self.degree(a) % 2 and self.degree(b) % 2) else 1
            out = {}
            for o, c in self.theta_on(g1, o1, o2).items():
                out[("D", g2, o)] = out.get(("D", g2, o), 0) + c
            for o, c in self.theta_on(g2, o2, o1).items():
                out[("D", g1, o)] = out.get(("D", g1, o), 0) - s * c
            return {k: c for k, c in out.items() if c}
        if ta == "D" and tb == "S":
            _, g, ot = a
            s = -1 if self.degree(a) % 2 else 1
            return {("S", o): s * c for o, c in self.theta_on(g, ot, b[1]).items()}
        if ta == "S" and tb == "D":
            return self._flip(b, a)
        return {}

    def _flip(self, a, b):
        """[b, a] from [a, b]."""
        s = -1 if (self.degree(a) % 2 and self.degree(b) % 2) else 1
        return {k: -s * c for k, c in self._bracket(a, b).items()}

    # -- helpers -------------------------------------------------------------------
    def q(self, carrier=None, letters=None):
        """q (or phi∘q for a carrier S -> T) as a vector of degree -1."""
        C = self.C
        out = {}
        for a in (letters if letters is not None else C.letters):
            if carrier is None:
                img = {a: Fraction(1)}
            else:
                img = carrier.apply_idx(a)
            for o, c in img.items():
                # q is perturbation data, so it ignores the word rule but not the truncation
                if self.T.basis.length[o] <= self.N:
                    out[("H", (a,), o)] = Fraction(c)
        return out

    def hat(self, x_coords):
        """x ↦ x̂ (the map 1 ↦ x on the word ())."""
        return {("H", (), o): Fraction(c) for o, c in x_coords.items()}

    def derivation_vector(self, theta):
        out = {}
        for g, v in theta.values.items():
            for o, c in self.T.coords(v).items():
                out[("D", g, o)] = c
        return out

    def relative_adjoint_vector(self, x_coords):
        """ad^M_x as a vector on derivation keys."""
        T = self.T
        B = T.basis
        U = self.inclusion.U if self.inclusion is not None else frozenset()
        out = {}
        for o, c in x_coords.items():
            for g in range(len(T.names)):
                if g in U:
                    continue
                for o2, c2 in T.bracket_idx(o, B.by_content[(g,)][0]).items():
                    addto(out, {("D", g, o2): c2}, c)
        return out

    def perturbed(self, z, name=None):
        kw = dict(word_rule=self.word_rule, output_rule=self.output_rule, der=self.der,
                  inclusion=self.inclusion, s_part=self.s_part, s_hat=self.s_hat,
                  perturbation=lincomb([(1, self.z), (1, z)]), relative_tilde=self.relative_tilde,
                  degree0=self.degree0, name=name or self.name)
        return TwistedDgl(self.T, self.C, **kw)


# ---------------------------------------------------------------------------
# user-level convolution elements


class ConvolutionElement:
    """A vector of a TwistedDgl with its homogeneous degree."""

    def __init__(self, space: TwistedDgl, vec, degree=None):
        self.space = space
        self.vec = {k: Fraction(c) for k, c in vec.items() if c}
        if degree is None:
            degree = space.vec_degree(self.vec) if self.vec else None
        self.degree = degree

    def __add__(self, other):
        _same(self, other)
        return ConvolutionElement(self.space, lincomb([(1, self.vec), (1, other.vec)]), self.degree)

    def __sub__(self, other):
        _same(self, other)
        return ConvolutionElement(self.space, lincomb([(1, self.vec), (-1, other.vec)]), self.degree)

    def __mul__(self, c):
        return ConvolutionElement(self.space, {k: c * v for k, v in self.vec.items()}, self.degree)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ConvolutionElement) and self.vec == other.vec

    def __bool__(self):
        return bool(self.vec)

    def evaluate(self, word):
        """f(word) as an element of the target."""
        T = self.space.T
        coords = {k[2]: c for k, c in self.vec.items() if k[0] == "H" and k[1] == word}
        return GradedLieElement.from_coords(T, coords)

    def __repr__(self):
        return f"ConvolutionElement({self.space.name}, deg {self.degree}, {len(self.vec)} terms)"


def _same(f, g):
    if f.space.T is not g.space.T or f.space.C is not g.space.C:
        raise VariantMismatch("elements live over different coalgebras or targets")


def conv_bracket(f: ConvolutionElement, g: ConvolutionElement) -> ConvolutionElement:
    """[f, g](w) = sum kappa (-1)^{|g||w1|} [f(w1), g(w2)], computed in the smaller variant."""
    _same(f, g)
    sp = f.space
    r = sp.bracket(f.vec, g.vec)
    if f.space is not g.space:
        other = g.space
        bad = [k for k in r if not (sp.has_key(k) and other.has_key(k))]
        if bad:
            raise VariantMismatch(f"bracket leaves the common variant at {bad[0]!r}")
    deg = None if f.degree is None or g.degree is None else f.degree + g.degree
    return ConvolutionElement(sp, r, deg)


def conv_differential(f: ConvolutionElement) -> ConvolutionElement:
    deg = None if f.degree is None else f.degree - 1
    return ConvolutionElement(f.space, f.space.D(f.vec), deg)


def hom_space(S, T=None, *, letters=None, word_rule="all", N=None, W=None, d2_sign=COHERENT,
              perturbation=None, name="Hom"):
    """Hom(C(S), T) restricted by a word rule; T defaults to S."""
    T = T or S
    C = CECoalgebra(S, letters, N, W, d2_sign)
    return TwistedDgl(T, C, word_rule=word_rule, perturbation=perturbation, name=name)


def mc_residual_vec(space: TwistedDgl, z):
    """Dz + 1/2 [z, z] in an unperturbed space."""
    r = space.D(z)
    addto(r, space.bracket(z, z), Fraction(1, 2))
    return r


def morphism_to_mc(phi, N=None, W=None, d2_sign=COHERENT):
    """
    phi∘q for a cdgl morphism phi: S -> T, as a ConvolutionElement of
    Hom(C(S), T).  Raises ResidualNonzero when phi∘q fails the MC equation.
    """
    sp = hom_space(phi.source, phi.target, N=N, W=W, d2_sign=d2_sign, name="Hom(C(S),T)")
    z = sp.q(carrier=phi)
    r = mc_residual_vec(sp, z)
    if r:
        raise ResidualNonzero("phi∘q is not Maurer-Cartan", r)
    return ConvolutionElement(sp, z, -1)


def mc_to_relative_morphism_set(space: TwistedDgl, phi, gamma_images):
    """
    For gamma with gamma|_M = phi|_M, the element a = (gamma - phi)∘q of
    Hom^M(C(L), L)^{phi q}; checks that a is MC for D_{phi q}.
    ``gamma_images`` maps generator names to elements.
    """
    from .freelie import CdglMorphism
    L = phi.source
    gamma = CdglMorphism(L, phi.target, gamma_images)
    inc = space.inclusion
    for g in inc.U:
        if gamma.images[g] != phi.images[g]:
            raise CdglError(f"gamma and phi differ on the sub algebra generator {L.names[g]}")
    zq = space.q(carrier=phi)
    a = lincomb([(1, space.q(carrier=gamma)), (-1, zq)])
    a = {k: c for k, c in a.items() if c}
    # the space may already carry a perturbation; the total one is phi∘q
    pert = space.perturbed(lincomb([(1, zq), (-1, space.z)]))
    r = mc_residual_vec(pert, a)
    if r:
        raise ResidualNonzero("(gamma - phi)∘q is not MC in the perturbed space", r)
    bad = [k for k in a if not space.has_key(k)]
    if bad:
        raise VariantMismatch("(gamma - phi)∘q does not vanish on C(M)")
    return ConvolutionElement(pert, a, -1)


@dataclass
class RestrictionSequence:
    """0 -> Hom^M(C(L),T) -> Hom(C̄(L),T) -> Hom(C̄(M),T) -> 0 on bases."""
    window: DegreeWindow
    ranks: dict = field(default_factory=dict)     # k -> (kernel, total, image, target)
    chain_map: bool = None
    restricts_q: bool = None
    kernel_vanishes_on_M: bool = None

    @property
    def exact(self):
        return all(ke + im == tot and im == tgt for ke, tot, im, tgt in self.ranks.values())

    @property
    def ok(self):
        return self.exact and self.chain_map and self.restricts_q and self.kernel_vanishes_on_M


def restriction_sequence(L, T=None, *, N=None, W=None, window=None, d2_sign=COHERENT):
    """
    Restriction along C(j) for M = L(U) ⊂ L: kernel, total and image ranks
    per degree, plus chain map and q-compatibility checks (all perturbed by q).
    """
    T = T or L
    window = window or DegreeWindow(-1, 3)
    inc = L.inclusion()
    mlet = [i for i in range(len(L.basis)) if inc.in_sub(i)]
    CL = CECoalgebra(L, None, N, W, d2_sign)
    CM = CECoalgebra(L, mlet, N, W, d2_sign)
    kw = dict(inclusion=inc)
    tot0 = TwistedDgl(T, CL, word_rule="reduced", name="Hom(C̄(L),T)", **kw)
    tgt0 = TwistedDgl(T, CM, word_rule="reduced", name="Hom(C̄(M),T)", **kw)
    tot = tot0.perturbed(tot0.q(letters=CL.letters) if T is L else {})
    tgt = tgt0.perturbed(tgt0.q(letters=CM.letters) if T is L else {})
    ker = TwistedDgl(T, CL, word_rule="HomM", name="Hom^M(C(L),T)", **kw)
    mset = frozenset(mlet)

    def restrict(vec):
        return {k: c for k, c in vec.items() if all(a in mset for a in k[1])}

    out = RestrictionSequence(window)
    chain = True
    for k in window.degrees():
        keys = tot.basis_keys(k)
        img = Echelon()
        for key in keys:
            r = restrict({key: Fraction(1)})
            if r:
                img.add(tgt.coords(k, r))
        out.ranks[k] = (len(ker.basis_keys(k)), len(keys), len(img), len(tgt.basis_keys(k)))
        for key in keys:
            if restrict(tot.D({key: Fraction(1)})) != tgt.D(restrict({key: Fraction(1)})):
                chain = False
    out.chain_map = chain
    out.restricts_q = restrict(tot0.q()) == tgt0.q()
    out.kernel_vanishes_on_M = all(any(a not in mset for a in key[1])
                                   for k in window.degrees() for key in ker.basis_keys(k))
    return out
