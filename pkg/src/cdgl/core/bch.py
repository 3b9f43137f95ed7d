"""
Baker-Campbell-Hausdorff product in nilpotent Lie algebras.

The product is evaluated with Dynkin's formula, written as a sum over words
w in the letters X, Y of coefficient(w) times the right-normed bracket of w.
Vectors are plain dicts and the Lie bracket is passed in, so the same code
serves tensor-algebra elements, basis coordinates and derivations.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial

from ..errors import AlgebraMismatch, CdglError
from .linalg import Echelon, addto, scaled

MAX_NILPOTENCY = 64


@lru_cache(maxsize=None)
def dynkin_coefficients(m):
    """
    {word: coefficient} for words of length m over (0 = X, 1 = Y) such that
    log(e^X e^Y) has length-m part sum coefficient * [w1, [w2, ... wm]].
    """
    out = {}
    for word in itertools.product((0, 1), repeat=m):
        total = Fraction(0)
        # split the word into n blocks of the shape X^r Y^s with r + s > 0
        for blocks in _blockings(word):
            n = len(blocks)
            denom = n * m
            for r, s in blocks:
                denom *= factorial(r) * factorial(s)
            total += Fraction((-1) ** (n - 1), denom)
        if total:
            out[word] = total
    return out


def _blockings(word):
    """All ways to cut ``word`` into consecutive blocks X^r Y^s (r + s > 0)."""
    if not word:
        yield []
        return
    # the first block takes a run of X's followed by a run of Y's
    m = len(word)
    r = 0
    while r < m and word[r] == 0:
        r += 1
    for cut_r in range(0, r + 1):
        if cut_r < r:
            # block is X^cut_r only; the remainder starts with X
            if cut_r == 0:
                continue
            for rest in _blockings(word[cut_r:]):
                yield [(cut_r, 0)] + rest
        else:
            s = 0
            while r + s < m and word[r + s] == 1:
                s += 1
            for cut_s in range(0, s + 1):
                if cut_r + cut_s == 0:
                    continue
                for rest in _blockings(word[r + cut_s:]):
                    yield [(cut_r, cut_s)] + rest


def nilpotency_length(x, y, br, cap=MAX_NILPOTENCY):
    """Smallest m such that every right-normed m-fold bracket of x, y vanishes."""
    level = {(0,): x, (1,): y}
    level = {w: v for w, v in level.items() if v}
    m = 1
    while level:
        m += 1
        if m > cap:
            raise CdglError("elements do not generate a nilpotent subalgebra within the cap")
        nxt = {}
        for w, v in level.items():
            for a, e in ((0, x), (1, y)):
                b = br(e, v)
                if b:
                    nxt[(a,) + w] = b
        level = nxt
    return m


def bch_series(x, y, br, max_length=None):
    """log(e^x e^y) for dict vectors x, y under the bracket ``br``."""
    if max_length is None:
        max_length = nilpotency_length(x, y, br) - 1
    out = {}
    addto(out, x)
    addto(out, y)
    cache = {(0,): x, (1,): y}

    def rn(w):
        r = cache.get(w)
        if r is None:
            tail = rn(w[1:])
            r = br(x if w[0] == 0 else y, tail) if tail else {}
            cache[w] = r
        return r

    for m in range(2, max_length + 1):
        for w, c in dynkin_coefficients(m).items():
            v = rn(w)
            if v:
                addto(out, v, c)
    return out


class NilpotentLie:
    """
    A finite-dimensional nilpotent Lie algebra given by a bracket on dict
    vectors, optionally modulo an ideal spanned by ``ideal`` vectors (for
    example boundaries inside degree-0 cycles).
    """

    def __init__(self, bracket, ideal=(), name=None):
        self.bracket = bracket
        self.name = name
        self._ech = Echelon()
        for v in ideal:
            self._ech.add(v)

    def normal_form(self, v):
        return self._ech.reduce(v)


class BCHGroupElement:
    """Class of a representative in a NilpotentLie, with the BCH group law."""

    __slots__ = ("algebra", "rep")

    def __init__(self, algebra: NilpotentLie, rep):
        self.algebra = algebra
        self.rep = algebra.normal_form(dict(rep))

    def __mul__(self, other):
        return bch_group_mul(self, other)

    def inverse(self):
        return BCHGroupElement(self.algebra, scaled(self.rep, -1))

    def is_identity(self):
        return not self.rep

    def __eq__(self, other):
        return isinstance(other, BCHGroupElement) and self.algebra is other.algebra and self.rep == other.rep

    def __hash__(self):
        return hash(frozenset(self.rep.items()))

    def __repr__(self):
        return f"BCHGroupElement({self.rep})"


def bch_group_mul(a: BCHGroupElement, b: BCHGroupElement) -> BCHGroupElement:
    if a.algebra is not b.algebra:
        raise AlgebraMismatch("group elements live over different Lie algebras")
    return BCHGroupElement(a.algebra, bch_series(a.rep, b.rep, a.algebra.bracket))
