"""
Generic finite dgl's given on a coordinate basis, maps between them and
the verification routines (chain map, bracket compatibility, quasi-iso).

A FiniteDgl has hashable, mutually comparable basis keys with a degree, the
differential of a key and the bracket of two keys.  In some degrees the
space is a proper subspace of the coordinate span (degree 0 of the connected
derivation dgl's); ``subspace(k)`` then returns spanning vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core.complexes import ChainComplex, DegreeWindow
from .core.linalg import Echelon, addto, lincomb, solve_columns
from .errors import RuleIncompatible, WindowTooNarrow


class FiniteDgl:
    name = "dgl"

    # subclasses implement these three (and basis_keys)
    def degree(self, key):
        raise NotImplementedError

    def D_key(self, key):
        raise NotImplementedError

    def bracket_keys(self, a, b):
        raise NotImplementedError

    def basis_keys(self, k):
        raise NotImplementedError

    def subspace(self, k):
        return None

    # -- linear extensions ---------------------------------------------------
    def D(self, vec):
        return lincomb((c, self.D_key(k)) for k, c in vec.items())

    def bracket(self, u, v):
        out = {}
        for a, x in u.items():
            for b, y in v.items():
                r = self.bracket_keys(a, b)
                if r:
                    addto(out, r, x * y)
        return out

    def vec_degree(self, vec):
        degs = {self.degree(k) for k in vec}
        return degs.pop() if len(degs) == 1 else None

    def elements(self, k):
        sub = self.subspace(k)
        if sub is not None:
            return sub
        return [{key: Fraction(1)} for key in self.basis_keys(k)]

    def contains(self, vec):
        """Whether a homogeneous vector lies in the space."""
        if not vec:
            return True
        k = self.vec_degree(vec)
        if k is None:
            return all(self.contains({a: c}) for a, c in vec.items())
        sub = self.subspace(k)
        keys = set(self.basis_keys(k))
        if any(a not in keys for a in vec):
            return False
        if sub is None:
            return True
        return solve_columns(sub, vec) is not None

    # -- coordinates in the per-degree element basis -----------------------
    def coords(self, k, vec):
        """Coordinates of vec (degree k) in the basis ``elements(k)``."""
        if not vec:
            return {}
        sub = self.subspace(k)
        if sub is None:
            pos = self._positions(k)
            out = {}
            for key, c in vec.items():
                if key not in pos:
                    raise RuleIncompatible(f"{self.name}: vector leaves the space at {key!r}")
                out[pos[key]] = c
            return out
        sol = solve_columns(sub, vec)
        if sol is None:
            raise RuleIncompatible(f"{self.name}: vector leaves the degree {k} subspace")
        return sol

    def _positions(self, k):
        cache = self.__dict__.setdefault("_poscache", {})
        if k not in cache:
            cache[k] = {key: i for i, key in enumerate(self.basis_keys(k))}
        return cache[k]

    def chain_complex(self, window: DegreeWindow) -> ChainComplex:
        cache = self.__dict__.setdefault("_cccache", {})
        key = (window.min_degree, window.max_degree)
        if key in cache:
            return cache[key]
        labels, diff = {}, {}
        for k in window.degrees():
            els = self.elements(k)
            labels[k] = list(range(len(els)))
            cols = []
            for v in els:
                img = self.D(v)
                if k - 1 < window.min_degree:
                    cols.append({})
                else:
                    cols.append(self.coords(k - 1, img))
            diff[k] = cols
        cc = ChainComplex(labels, diff, window)
        cache[key] = cc
        return cc

    def betti(self, k, window=None):
        window = window or DegreeWindow(k - 1, k + 1)
        return self.chain_complex(window).betti(k)

    # -- axioms ----------------------------------------------------------------
    def check_square_zero(self, window):
        bad = []
        for k in window.degrees():
            for v in self.elements(k):
                if self.D(self.D(v)):
                    bad.append((k, v))
        return bad

    def sample_keys(self, window, limit=None, seed=0):
        groups = {}
        for k in window.degrees():
            for key in self.basis_keys(k):
                groups.setdefault(key[0] if isinstance(key, tuple) else None, []).append(key)
        keys = [key for g in groups.values() for key in g]
        if limit is None or len(keys) <= limit:
            return keys
        # stratified by key kind so every kind of pair is exercised
        rng = random.Random(seed)
        share = max(1, limit // len(groups))
        out = []
        for tag in sorted(groups, key=repr):
            g = groups[tag]
            out.extend(g if len(g) <= share else rng.sample(g, share))
        return sorted(out, key=repr)

    def check_jacobi(self, keys):
        """Graded Jacobi and antisymmetry on all triples/pairs from keys; returns failures."""
        fails = []
        deg = {k: self.degree(k) for k in keys}
        for a in keys:
            for b in keys:
                s = -1 if (deg[a] % 2 and deg[b] % 2) else 1
                ab = self.bracket_keys(a, b)
                ba = self.bracket_keys(b, a)
                t = dict(ab)
                addto(t, ba, s)
                if t:
                    fails.append(("antisymmetry", a, b))
        for a in keys:
            for b in keys:
                for c in keys:
                    # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
                    lhs = self.bracket({a: 1}, self.bracket_keys(b, c))
                    r1 = self.bracket(self.bracket_keys(a, b), {c: 1})
                    r2 = self.bracket({b: 1}, self.bracket_keys(a, c))
                    s = -1 if (deg[a] % 2 and deg[b] % 2) else 1
                    t = dict(lhs)
                    addto(t, r1, -1)
                    addto(t, r2, -s)
                    if t:
                        fails.append(("jacobi", a, b, c))
        return fails

    def check_leibniz(self, keys):
        """D[a,b] = [Da,b] + (-1)^{|a|}[a,Db] on all pairs."""
        fails = []
        for a in keys:
            da = self.D_key(a)
            s = -1 if self.degree(a) % 2 else 1
            for b in keys:
                lhs = self.D(self.bracket_keys(a, b))
                t = dict(lhs)
                addto(t, self.bracket(da, {b: 1}), -1)
                addto(t, self.bracket({a: 1}, self.D_key(b)), -s)
                if t:
                    fails.append((a, b))
        return fails


# ---------------------------------------------------------------------------

@dataclass
class QuasiIsoCertificate:
    window: DegreeWindow
    ranks: dict = field(default_factory=dict)        # k -> (dim H_A, dim H_B, rank H(f))
    matrices: dict = field(default_factory=dict)     # k -> rows = images of H_A basis
    not_complexes: list = field(default_factory=list)  # sides whose D² != 0

    @property
    def ok(self):
        return not self.not_complexes and all(a == b == r for a, b, r in self.ranks.values())

    def summary(self):
        if self.not_complexes:
            return {"not a complex": list(self.not_complexes)}
        return {str(k): {"domain": a, "codomain": b, "rank": r} for k, (a, b, r) in sorted(self.ranks.items())}


class DglMap:
    """
    Linear map between FiniteDgl's given on basis keys.  ``image(key)`` returns
    a vector of the codomain.  Verification flags are only set by the
    ``verify_*`` methods.
    """

    def __init__(self, name, domain, codomain, image):
        self.name = name
        self.domain = domain
        self.codomain = codomain
        self._image = image
        self._cache = {}
        self.chain_map_verified = None
        self.bracket_verified = None
        self.quasi_iso_verified = None
        self.failures = {}

    def image_key(self, key):
        r = self._cache.get(key)
        if r is None:
            r = self._image(key)
            self._cache[key] = r
        return r

    def __call__(self, vec):
        return lincomb((c, self.image_key(k)) for k, c in vec.items())

    def verify_chain_map(self, window):
        bad = []
        for k in window.degrees():
            for v in self.domain.elements(k):
                lhs = self(self.domain.D(v))
                rhs = self.codomain.D(self(v))
                if lhs != rhs:
                    bad.append((k, v))
        self.chain_map_verified = not bad
        self.failures["chain"] = bad
        return not bad

    def verify_bracket(self, window, limit=40, seed=0):
        keys = self.domain.sample_keys(window, limit, seed)
        bad = []
        for a in keys:
            fa = self.image_key(a)
            for b in keys:
                lhs = self(self.domain.bracket_keys(a, b))
                rhs = self.codomain.bracket(fa, self.image_key(b))
                if lhs != rhs:
                    bad.append((a, b))
        self.bracket_verified = not bad
        self.failures["bracket"] = bad
        return not bad

    def verify_quasi_iso(self, window):
        cert = verify_quasi_iso(self, window)
        self.quasi_iso_verified = cert.ok
        return cert


def verify_quasi_iso(f: DglMap, window: DegreeWindow) -> QuasiIsoCertificate:
    """
    Compare H(A) and H(B) in every degree of ``window`` through H(f).  The
    complexes are built on the window widened by one on each side.
    """
    wide = DegreeWindow(window.min_degree - 1, window.max_degree + 1)
    cert = QuasiIsoCertificate(window)
    for side in (f.domain, f.codomain):
        if side.check_square_zero(wide):
            cert.not_complexes.append(side.name)
    if cert.not_complexes:
        return cert
    A = f.domain.chain_complex(wide)
    B = f.codomain.chain_complex(wide)
    for k in window.degrees():
        ha = A.homology(k)
        hb = B.homology(k)
        els = f.domain.elements(k)
        rows = []
        for z in ha.representatives:
            v = lincomb((c, els[i]) for i, c in z.items())
            img = f(v)
            co = f.codomain.coords(k, img)
            rows.append(B.homology_class(k, co))
        ech = Echelon()
        for r in rows:
            ech.add({i: c for i, c in enumerate(r) if c})
        cert.ranks[k] = (ha.betti, hb.betti, len(ech))
        cert.matrices[k] = rows
    return cert


class CoordinateComplex(FiniteDgl):
    """A FiniteDgl with zero bracket built from explicit key data (for cones and shifts)."""

    def __init__(self, name, keys_by_degree, dfun):
        self.name = name
        self._keys = keys_by_degree
        self._deg = {k: d for d, ks in keys_by_degree.items() for k in ks}
        self._dfun = dfun

    def degree(self, key):
        return self._deg[key]

    def basis_keys(self, k):
        return self._keys.get(k, [])

    def D_key(self, key):
        return self._dfun(key)

    def bracket_keys(self, a, b):
        return {}
