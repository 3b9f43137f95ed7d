"""
Brute-force oracles that share no code with the library.

primitive_dimension: the free graded Lie algebra on V is the space of
primitive elements of the tensor algebra T(V) with the graded shuffle
coproduct, so its dimension in a given content is the nullity of the
reduced coproduct on the words of that content.

tensor_bch: log(exp(x) exp(y)) in the tensor algebra truncated at a word
length, with exp and log expanded as power series.
"""

import itertools
from fractions import Fraction
from math import factorial


def rank(rows):
    """Rank of a list of dict rows by plain Gaussian elimination."""
    rows = [dict(r) for r in rows if r]
    pivots = []
    for r in rows:
        for p, pr in pivots:
            if p in r:
                c = r[p] / pr[p]
                for k, v in pr.items():
                    r[k] = r.get(k, 0) - c * v
                    if not r[k]:
                        del r[k]
        if r:
            pivots.append((min(r), r))
    return len(pivots)


def koszul_front(word, subset, deg):
    """Sign of moving the letters at positions ``subset`` to the front."""
    s = 0
    chosen = set(subset)
    for i in range(len(word)):
        if i in chosen:
            for j in range(i):
                if j not in chosen:
                    s += deg[word[i]] * deg[word[j]]
    return -1 if s % 2 else 1


def primitive_dimension(content, deg):
    """Dimension of the primitives of T(V) spanned by words with this content."""
    words = sorted(set(itertools.permutations(content)))
    n = len(content)
    columns = []
    for w in words:
        col = {}
        for k in range(1, n):
            for sub in itertools.combinations(range(n), k):
                rest = [i for i in range(n) if i not in sub]
                key = (tuple(w[i] for i in sub), tuple(w[i] for i in rest))
                col[key] = col.get(key, 0) + koszul_front(w, sub, deg)
        columns.append({k: Fraction(v) for k, v in col.items() if v})
    # nullity = number of words minus the rank of the reduced coproduct
    return len(words) - rank(columns)


def tmul(a, b, N):
    out = {}
    for u, x in a.items():
        for v, y in b.items():
            if len(u) + len(v) <= N:
                w = u + v
                out[w] = out.get(w, 0) + x * y
    return {w: c for w, c in out.items() if c}


def tadd(a, b, c=1):
    out = dict(a)
    for w, x in b.items():
        out[w] = out.get(w, 0) + c * x
    return {w: v for w, v in out.items() if v}


def texp(x, N):
    out = {(): Fraction(1)}
    power = {(): Fraction(1)}
    for k in range(1, N + 1):
        power = tmul(power, x, N)
        out = tadd(out, power, Fraction(1, factorial(k)))
    return out


def tlog(g, N):
    """log(1 + u) for g = 1 + u with u having no constant term."""
    u = {w: c for w, c in g.items() if w}
    out = {}
    power = {(): Fraction(1)}
    for k in range(1, N + 1):
        power = tmul(power, u, N)
        out = tadd(out, power, Fraction((-1) ** (k + 1), k))
    return out


def tensor_bch(x, y, N):
    return tlog(tmul(texp(x, N), texp(y, N), N), N)
