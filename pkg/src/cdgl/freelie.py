"""
Truncated free graded Lie algebras with a differential.

Elements live in the tensor algebra T(V) modulo words longer than the
truncation order N: a word is a tuple of generator indices and an element is
a dict ``{word: Fraction}``.  The Lie algebra L(V)/L^{N+1} sits inside as the
span of iterated graded commutators.

For linear algebra the library also uses a fixed basis of the truncated Lie
algebra.  The basis is built per *content* (the multiset of generators of a
word), which is a multigrading of both T(V) and L(V).  A consequence used all
over the package: the basis of the sub algebra generated by a subset U of the
generators is exactly the set of basis elements whose content lies in U.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core.complexes import DegreeWindow
from .core.linalg import Echelon, addto
from .errors import (DegreeError, NotAMorphism, PresentationMismatch,
                     ValidationError)

DEFAULT_TRUNCATION = 6
DEFAULT_WINDOW = DegreeWindow(-2, 8)


# ---------------------------------------------------------------------------
# tensor algebra on dicts

def wdeg(word, deg):
    return sum(deg[g] for g in word)


def tmul(a, b, N):
    out = {}
    for w1, c1 in a.items():
        for w2, c2 in b.items():
            if len(w1) + len(w2) > N:
                continue
            w = w1 + w2
            x = out.get(w, 0) + c1 * c2
            if x:
                out[w] = x
            else:
                del out[w]
    return out


def tbracket(a, b, N, deg):
    """Graded commutator ab - (-1)^{|a||b|} ba, word by word."""
    out = {}
    for w1, c1 in a.items():
        d1 = wdeg(w1, deg)
        for w2, c2 in b.items():
            if len(w1) + len(w2) > N:
                continue
            c = c1 * c2
            s = -c if (d1 % 2 and wdeg(w2, deg) % 2) else c
            for w, v in ((w1 + w2, c), (w2 + w1, -s)):
                x = out.get(w, 0) + v
                if x:
                    out[w] = x
                else:
                    del out[w]
    return out


def tmorph(a, images, N):
    """Apply the algebra map sending generator g to images[g] (tensor dicts)."""
    out = {}
    cache = {(): {(): Fraction(1)}}

    def img(word):
        r = cache.get(word)
        if r is None:
            r = tmul(img(word[:-1]), images.get(word[-1], {}), N)
            cache[word] = r
        return r

    for w, c in a.items():
        addto(out, img(w), c)
    return out


def tder(a, images, k, N, deg, carrier=None):
    """
    Apply a degree-k (carrier-)derivation determined by ``images`` on generators.

    theta(g1...gm) = sum_i (-1)^{k(|g1|+...+|g_{i-1}|)} f(g1..g_{i-1}) theta(g_i) f(g_{i+1}..g_m)
    with f = carrier (identity when None).
    """
    out = {}
    for w, c in a.items():
        prefix_deg = 0
        for i, g in enumerate(w):
            im = images.get(g)
            if im:
                sign = -1 if (k % 2 and prefix_deg % 2) else 1
                if carrier is None:
                    left = {w[:i]: Fraction(1)}
                    right = {w[i + 1:]: Fraction(1)}
                else:
                    left = tmorph({w[:i]: Fraction(1)}, carrier, N)
                    right = tmorph({w[i + 1:]: Fraction(1)}, carrier, N)
                addto(out, tmul(tmul(left, im, N), right, N), sign * c)
            prefix_deg += deg[g]
    return out


def content(word):
    return tuple(sorted(word))


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


class CdglPresentation:
    """
    A free Lie algebra on named generators with a differential, truncated at
    bracket length N.

    ``differential`` maps generator names to values given as GradedLieElement,
    expression strings (``"1/2 [x1, x1]"``), tensor dicts keyed by tuples of
    names, or callables receiving the presentation itself.
    ``filtration`` is an optional list of name sets V^0 ⊃ V^1 ⊃ ... (V^0 is
    all generators and the trailing empty set may be omitted).
    ``sub`` optionally names the generators U of a sub dgl.
    """

    def __init__(self, generators, differential=None, truncation=DEFAULT_TRUNCATION,
                 window=None, filtration=None, sub=None, strict=True, name=None):
        gens = []
        for g in generators:
            if isinstance(g, Generator):
                gens.append(g)
            else:
                n, d = g
                gens.append(Generator(str(n), int(d)))
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValidationError("generator names must be unique")
        if truncation < 1:
            raise ValidationError("truncation order must be at least 1")
        self.name = name
        self.generators = tuple(gens)
        self.names = tuple(names)
        self.index = {n: i for i, n in enumerate(names)}
        self.deg = tuple(g.degree for g in gens)
        self.N = int(truncation)
        self.window = window if window is not None else DEFAULT_WINDOW
        self._basis = None
        self._d = {}
        self._dcache = {}
        self._bcache = {}
        self.filtration = None
        if filtration is not None:
            self.filtration = self._check_filtration(filtration)
        self.sub = None
        if sub is not None:
            self.sub = frozenset(self.index[n] for n in self._known(sub))
        self.warnings = []
        images = {}
        for gname, value in (differential or {}).items():
            if gname not in self.index:
                raise ValidationError(f"differential given for unknown generator {gname!r}")
            images[self.index[gname]] = self._to_terms(value)
        self._set_differential(images)
        if strict:
            report = check_square_zero(self)
            if not report.ok:
                raise ValidationError(f"d^2 != 0 on {report.generator}: {report.residue}")
        if not self.is_minimal():
            self.warnings.append("non-minimal presentation: some differential has a linear part")
        if self.sub is not None:
            self.inclusion()  # validates closure of the sub dgl

    # -- construction helpers ------------------------------------------------
    def _known(self, names):
        for n in names:
            if n not in self.index:
                raise ValidationError(f"unknown generator {n!r}")
        return names

    def _check_filtration(self, filtration):
        levels = [frozenset(self.index[n] for n in self._known(list(s))) for s in filtration]
        if not levels or levels[0] != frozenset(range(len(self.names))):
            levels.insert(0, frozenset(range(len(self.names))))
        if levels[-1]:
            levels.append(frozenset())
        for a, b in zip(levels, levels[1:]):
            if not b <= a:
                raise ValidationError("filtration must be descending")
        return tuple(levels)

    def _to_terms(self, value):
        if isinstance(value, GradedLieElement):
            if value.p.names != self.names or value.p.deg != self.deg:
                raise PresentationMismatch("differential value built over different generators")
            return dict(value.terms)
        if isinstance(value, str):
            from .dsl import parse_expression
            return parse_expression(value, self).terms
        if callable(value):
            return self._to_terms(value(self))
        if isinstance(value, dict):
            out = {}
            for word, c in value.items():
                if isinstance(word, str):
                    word = (word,)
                w = tuple(self.index[n] if isinstance(n, str) else n for n in word)
                if c:
                    out[w] = out.get(w, 0) + Fraction(c)
            return {w: c for w, c in out.items() if c}
        if value == 0:
            return {}
        raise ValidationError(f"cannot interpret differential value {value!r}")

    def _set_differential(self, images):
        d = {}
        for g, terms in images.items():
            terms = {w: c for w, c in terms.items() if len(w) <= self.N}
            for w in terms:
                if wdeg(w, self.deg) != self.deg[g] - 1:
                    raise ValidationError(
                        f"d {self.names[g]} has a term of degree {wdeg(w, self.deg)}, expected {self.deg[g] - 1}")
            if not self.is_lie_terms(terms):
                raise ValidationError(f"d {self.names[g]} is not a Lie element")
            if terms:
                d[g] = terms
        self._d = d

    # -- basic access ----------------------------------------------------------
    def gens(self):
        """name -> generator element."""
        return {n: self.gen(n) for n in self.names}

    def gen(self, name):
        i = self.index[name] if isinstance(name, str) else name
        return GradedLieElement(self, {(i,): Fraction(1)}, self.deg[i])

    def zero(self, degree=None):
        return GradedLieElement(self, {}, degree)

    def d_image(self, g):
        return self._d.get(g, {})

    def d_element(self, name):
        g = self.index[name]
        return GradedLieElement(self, dict(self.d_image(g)), self.deg[g] - 1)

    def is_minimal(self):
        return all(len(w) >= 2 for t in self._d.values() for w in t)

    def same_as(self, other):
        return (self.names == other.names and self.deg == other.deg and self.N == other.N
                and self._d == other._d)

    def __repr__(self):
        return f"CdglPresentation({', '.join(f'{n}:{d}' for n, d in zip(self.names, self.deg))}; N={self.N})"

    # -- Lie basis -------------------------------------------------------------
    @property
    def basis(self):
        if self._basis is None:
            self._basis = LieBasis(self)
        return self._basis

    def is_lie_terms(self, terms):
        return self.basis.is_lie(terms)

    def coords(self, terms):
        return self.basis.coords(terms)

    # cached structure constants in basis coordinates
    def bracket_idx(self, i, j):
        key = (i, j)
        r = self._bcache.get(key)
        if r is None:
            B = self.basis
            if B.length[i] + B.length[j] > self.N:
                r = {}
            else:
                r = B.coords(tbracket(B.vec[i], B.vec[j], self.N, self.deg))
            self._bcache[key] = r
        return r

    def bracket_coords(self, a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                addto(out, self.bracket_idx(i, j), x * y)
        return out

    def d_idx(self, i):
        r = self._dcache.get(i)
        if r is None:
            B = self.basis
            r = B.coords(tder(B.vec[i], self._d, -1, self.N, self.deg))
            self._dcache[i] = r
        return r

    def d_coords(self, a):
        out = {}
        for i, x in a.items():
            addto(out, self.d_idx(i), x)
        return out

    def inclusion(self, sub=None):
        return SubDglInclusion(self, sub if sub is not None else [self.names[i] for i in sorted(self.sub or ())])

    def filtration_level(self, g):
        """Largest i with generator g in V^i (0 when no filtration)."""
        if self.filtration is None:
            return 0
        lvl = 0
        for i, s in enumerate(self.filtration):
            if g in s:
                lvl = i
        return lvl


class LieBasis:
    """
    Basis of the truncated free Lie algebra, built content by content.

    Within a content the candidates are the right-normed brackets
    [g1, [g2, ... [g_{k-1}, g_k]]] of all distinct arrangements, in lex order,
    kept greedily when independent.  Indices are global and ordered by
    (length, content).
    """

    def __init__(self, p: CdglPresentation):
        self.p = p
        self.vec = []        # tensor dict of each basis element
        self.expr = []       # generator sequence of its right-normed bracket
        self.content = []
        self.degree = []
        self.length = []
        self.by_content = {}
        self._extract = {}   # content -> (pivot words, inverse matrix rows)
        self._rn = {}
        ng = len(p.names)
        for k in range(1, p.N + 1):
            for c in itertools.combinations_with_replacement(range(ng), k):
                self._build(c)

    def _right_normed(self, word):
        r = self._rn.get(word)
        if r is None:
            if len(word) == 1:
                r = {word: Fraction(1)}
            else:
                r = tbracket({(word[0],): Fraction(1)}, self._right_normed(word[1:]), self.p.N, self.p.deg)
            self._rn[word] = r
        return r

    def _build(self, c):
        deg = self.p.deg
        ech = Echelon()
        chosen = []
        for perm in sorted(set(itertools.permutations(c))):
            v = self._right_normed(perm)
            if v and ech.add(v):
                chosen.append((perm, v))
        idxs = []
        for perm, v in chosen:
            idxs.append(len(self.vec))
            self.vec.append(v)
            self.expr.append(perm)
            self.content.append(c)
            self.degree.append(sum(deg[g] for g in c))
            self.length.append(len(c))
        self.by_content[c] = idxs
        if not idxs:
            self._extract[c] = ((), [])
            return
        # pivot words: one per echelon row; the square matrix of basis
        # coefficients on those words is invertible
        pivots = sorted(ech.pivots)
        m = len(idxs)
        mat = [[self.vec[i].get(w, Fraction(0)) for w in pivots] for i in idxs]
        inv = _invert(mat)
        self._extract[c] = (tuple(pivots), inv)
        assert len(pivots) == m

    def __len__(self):
        return len(self.vec)

    def indices(self, degree=None, max_length=None, min_length=1, within=None):
        out = []
        for i in range(len(self.vec)):
            if degree is not None and self.degree[i] != degree:
                continue
            if max_length is not None and self.length[i] > max_length:
                continue
            if self.length[i] < min_length:
                continue
            if within is not None and not set(self.content[i]) <= within:
                continue
            out.append(i)
        return out

    def coords(self, terms):
        """Coordinates of a Lie element given by tensor terms (not checked)."""
        groups = {}
        for w, c in terms.items():
            groups.setdefault(content(w), {})[w] = c
        out = {}
        for c, part in groups.items():
            if c not in self._extract:
                continue  # longer than N
            pivots, inv = self._extract[c]
            idxs = self.by_content[c]
            vp = [part.get(w, 0) for w in pivots]
            if not any(vp):
                continue
            for col, i in enumerate(idxs):
                x = sum((vp[r] * inv[r][col] for r in range(len(pivots)) if vp[r]), Fraction(0))
                if x:
                    out[i] = x
        return out

    def terms(self, coords):
        out = {}
        for i, c in coords.items():
            addto(out, self.vec[i], c)
        return out

    def is_lie(self, terms):
        t = {w: c for w, c in terms.items() if len(w) <= self.p.N}
        back = self.terms(self.coords(t))
        return back == {w: Fraction(c) for w, c in t.items() if c}

    def render(self, i):
        names = self.p.names
        w = self.expr[i]
        s = names[w[-1]]
        for g in reversed(w[:-1]):
            s = f"[{names[g]}, {s}]"
        return s


def _invert(mat):
    """Inverse of a square Fraction matrix (rows in, rows out)."""
    n = len(mat)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col])
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [r[n:] for r in a]


# ---------------------------------------------------------------------------

class GradedLieElement:
    """
    Element of a truncated free Lie algebra, stored by its tensor terms.

    ``degree`` is the common degree of all words, or None for a sum of
    several homogeneous pieces.
    """

    __slots__ = ("p", "terms", "degree")

    def __init__(self, p, terms, degree=None):
        self.p = p
        self.terms = {w: Fraction(c) for w, c in terms.items() if c and len(w) <= p.N}
        degs = {wdeg(w, p.deg) for w in self.terms}
        if len(degs) == 1:
            (d,) = degs
            if degree is not None and degree != d:
                raise DegreeError(f"terms have degree {d}, declared {degree}")
            degree = d
        elif len(degs) > 1:
            degree = None
        self.degree = degree

    @classmethod
    def from_coords(cls, p, coords, degree=None):
        return cls(p, p.basis.terms(coords), degree)

    def coords(self):
        return self.p.coords(self.terms)

    def _check(self, other):
        if not isinstance(other, GradedLieElement):
            raise TypeError("expected GradedLieElement")
        if other.p is not self.p and not self.p.same_as(other.p):
            raise PresentationMismatch("elements of different presentations")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        t = dict(self.terms)
        addto(t, other.terms)
        deg = self.degree if self.degree == other.degree else None
        return GradedLieElement(self.p, t, deg if t else (self.degree if self.degree is not None else other.degree))

    __radd__ = __add__

    def __neg__(self):
        return GradedLieElement(self.p, {w: -c for w, c in self.terms.items()}, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = Fraction(c)
        return GradedLieElement(self.p, {w: c * v for w, v in self.terms.items()}, self.degree)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, GradedLieElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def bracket(self, other):
        return bracket(self, other)

    def d(self):
        return apply_differential(self.p, self)

    def lcs(self, n):
        return lcs_component(self, n)

    def min_length(self):
        return min((len(w) for w in self.terms), default=None)

    def homogeneous_parts(self):
        parts = {}
        for w, c in self.terms.items():
            parts.setdefault(wdeg(w, self.p.deg), {})[w] = c
        return {d: GradedLieElement(self.p, t, d) for d, t in sorted(parts.items())}

    def render(self):
        """Lie expression in the presentation's basis, e.g. '1/2 [x1, x1]'."""
        co = self.coords()
        if not co:
            return "0"
        pieces = []
        for i in sorted(co):
            c = co[i]
            e = self.p.basis.render(i)
            if c == 1:
                pieces.append(("+", e))
            elif c == -1:
                pieces.append(("-", e))
            else:
                pieces.append(("-" if c < 0 else "+", f"{abs(c)} {e}"))
        s = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, e in pieces[1:]:
            s += f" {sign} {e}"
        return s

    def __repr__(self):
        if not self.terms:
            return "0"
        names = self.p.names
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            parts.append(f"{self.terms[w]}*{''.join(names[g] + '.' for g in w).rstrip('.')}")
        return " + ".join(parts)


def bracket(a: GradedLieElement, b: GradedLieElement) -> GradedLieElement:
    """Graded bracket [a, b] = ab - (-1)^{|a||b|} ba, dropping words longer than N."""
    a._check(b)
    t = tbracket(a.terms, b.terms, a.p.N, a.p.deg)
    deg = a.degree + b.degree if a.degree is not None and b.degree is not None else None
    return GradedLieElement(a.p, t, deg if t else deg)


def apply_differential(p: CdglPresentation, a: GradedLieElement) -> GradedLieElement:
    if a.p is not p and not p.same_as(a.p):
        raise PresentationMismatch("element does not belong to this presentation")
    t = tder(a.terms, p._d, -1, p.N, p.deg)
    return GradedLieElement(p, t, a.degree - 1 if a.degree is not None else None)


def lcs_component(a: GradedLieElement, n: int) -> GradedLieElement:
    if n < 1:
        raise ValueError("n must be at least 1")
    return GradedLieElement(a.p, {w: c for w, c in a.terms.items() if len(w) == n}, a.degree)


def lie_basis(p: CdglPresentation, degree: int, max_length: int = None):
    max_length = p.N if max_length is None else max_length
    if max_length > p.N:
        raise ValueError("max_length exceeds the truncation order")
    B = p.basis
    return [GradedLieElement(p, dict(B.vec[i]), degree) for i in B.indices(degree, max_length)]


@dataclass
class SquareZeroReport:
    ok: bool
    generator: str = None
    residue: object = None


def check_square_zero(p: CdglPresentation) -> SquareZeroReport:
    for g, name in enumerate(p.names):
        r = tder(p.d_image(g), p._d, -1, p.N, p.deg)
        if r:
            return SquareZeroReport(False, name, GradedLieElement(p, r, p.deg[g] - 2))
    return SquareZeroReport(True)


class SubDglInclusion:
    """M = L(U) inside L = L(U + V), both truncated at the same order."""

    def __init__(self, ambient: CdglPresentation, sub_generators):
        self.ambient = ambient
        self.U = frozenset(ambient.index[n] for n in sub_generators)
        self.V = frozenset(range(len(ambient.names))) - self.U
        for g in self.U:
            for w in ambient.d_image(g):
                if not set(w) <= self.U:
                    raise ValidationError(
                        f"d {ambient.names[g]} leaves the sub algebra generated by {sorted(sub_generators)}")

    @property
    def sub_names(self):
        return [self.ambient.names[g] for g in sorted(self.U)]

    def in_sub(self, i):
        """Whether basis element i of the ambient algebra lies in M."""
        return set(self.ambient.basis.content[i]) <= self.U

    def sub_indices(self):
        return [i for i in range(len(self.ambient.basis)) if self.in_sub(i)]

    def sub_presentation(self):
        p = self.ambient
        gens = [p.generators[g] for g in sorted(self.U)]
        diff = {}
        for g in sorted(self.U):
            diff[p.names[g]] = {tuple(p.names[x] for x in w): c for w, c in p.d_image(g).items()}
        return CdglPresentation(gens, diff, truncation=p.N, window=p.window)


class CdglMorphism:
    """
    Algebra map between truncated presentations, given on generators.
    ``images`` maps source generator names to target elements.
    """

    def __init__(self, source, target, images, check=True):
        self.source = source
        self.target = target
        self.images = {}
        for n in source.names:
            v = images.get(n)
            g = source.index[n]
            if v is None or (isinstance(v, int) and v == 0):
                v = target.zero(source.deg[g])
            if isinstance(v, str):
                from .dsl import parse_expression
                v = parse_expression(v, target)
            if v.terms and v.degree != source.deg[g]:
                raise DegreeError(f"image of {n} has degree {v.degree}, expected {source.deg[g]}")
            self.images[g] = dict(v.terms)
        if check:
            for g, n in enumerate(source.names):
                lhs = self.apply_terms(source.d_image(g))
                rhs = tder(self.images[g], target._d, -1, target.N, target.deg)
                res = dict(lhs)
                addto(res, rhs, -1)
                if res:
                    raise NotAMorphism(f"phi(d {n}) != d phi({n})", n, GradedLieElement(target, res))

    def apply_terms(self, terms):
        return tmorph(terms, self.images, self.target.N)

    def __call__(self, a: GradedLieElement):
        return GradedLieElement(self.target, self.apply_terms(a.terms), a.degree)

    def apply_idx(self, i):
        """Target coordinates of the image of source basis element i."""
        return self.target.coords(self.apply_terms(self.source.basis.vec[i]))

    @classmethod
    def identity(cls, p):
        return cls(p, p, {n: p.gen(n) for n in p.names}, check=False)

    @classmethod
    def inclusion(cls, inc: SubDglInclusion):
        M = inc.sub_presentation()
        L = inc.ambient
        return cls(M, L, {n: L.gen(n) for n in M.names}, check=False)
