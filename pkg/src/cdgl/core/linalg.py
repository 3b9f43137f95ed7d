"""
Sparse exact linear algebra over Q.

Vectors are plain dicts ``{index: Fraction}`` without stored zeros.  Matrices
are stored by rows.  Everything here is deterministic: pivots are always the
smallest available column, free variables are set to zero.
"""

from __future__ import annotations

import heapq
from fractions import Fraction


def addto(acc, vec, coef=1):
    """acc += coef * vec, in place, dropping zeros."""
    if not coef:
        return acc
    for k, v in vec.items():
        x = acc.get(k, 0) + coef * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)
    return acc


def scaled(vec, coef):
    if not coef:
        return {}
    return {k: coef * v for k, v in vec.items()}


def lincomb(pairs):
    """Sum of coef * vec over (coef, vec) pairs."""
    acc = {}
    for c, v in pairs:
        addto(acc, v, c)
    return acc


class SparseMatrix:
    """Immutable sparse matrix over Q, stored by rows."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, entries=None):
        self.rows = rows
        self.cols = cols
        data = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i}, {j}) outside {rows}x{cols}")
            v = Fraction(v)
            if v:
                data.setdefault(i, {})[j] = v
        self._data = data

    @classmethod
    def from_dense(cls, dense, cols=None):
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(dense) for j, v in enumerate(row) if v}
        return cls(rows, cols, entries)

    @classmethod
    def from_rows(cls, rows, cols, row_dicts):
        m = cls(rows, cols)
        m._data = {i: dict(r) for i, r in enumerate(row_dicts) if r}
        return m

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def row(self, i):
        return dict(self._data.get(i, {}))

    def entries(self):
        return {(i, j): v for i, r in self._data.items() for j, v in r.items()}

    def __getitem__(self, ij):
        i, j = ij
        return self._data.get(i, {}).get(j, Fraction(0))

    def to_dense(self):
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def matvec(self, x):
        """Multiply by a dense or dict vector of length ``cols``."""
        if not isinstance(x, dict):
            x = {j: Fraction(v) for j, v in enumerate(x) if v}
        out = [Fraction(0)] * self.rows
        for i, r in self._data.items():
            out[i] = sum((v * x.get(j, 0) for j, v in r.items()), Fraction(0))
        return out

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._data == other._data)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={sum(map(len, self._data.values()))})"


class Echelon:
    """
    Incrementally maintained row echelon basis of a subspace.

    Each stored row is normalised so that its pivot (its smallest key) has
    coefficient 1.  Keys must be mutually comparable.  With ``track=True``
    every stored row remembers which inserted vectors it is made of, which
    is what ``solve`` and kernel computations need.
    """

    def __init__(self, track=False):
        self.pivots = {}       # pivot key -> row
        self.combos = {}       # pivot key -> {insert index: coef}
        self.track = track
        self.count = 0         # number of vectors offered to add()

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec, combo=None):
        """Return vec reduced against the stored rows (and the combination used)."""
        v = dict(vec)
        heap = [k for k in v if k in self.pivots]
        heapq.heapify(heap)
        seen = set()
        while heap:
            k = heapq.heappop(heap)
            if k in seen:
                continue
            c = v.get(k)
            if not c:
                continue
            seen.add(k)
            row = self.pivots[k]
            for kk, rv in row.items():
                x = v.get(kk, 0) - c * rv
                if x:
                    v[kk] = x
                    if kk in self.pivots and kk not in seen:
                        heapq.heappush(heap, kk)
                else:
                    v.pop(kk, None)
            if combo is not None:
                addto(combo, self.combos[k], -c)
        return v

    def add(self, vec):
        """Insert vec; return True iff it enlarged the span."""
        idx = self.count
        self.count += 1
        combo = {idx: Fraction(1)} if self.track else None
        v = self.reduce(vec, combo)
        if not v:
            self._last_dependency = combo
            return False
        p = min(v)
        inv = 1 / Fraction(v[p])
        v = {k: x * inv for k, x in v.items()}
        self.pivots[p] = v
        if self.track:
            self.combos[p] = {k: x * inv for k, x in combo.items()}
        self._last_dependency = None
        return True

    def contains(self, vec):
        return not self.reduce(vec)

    def fully_reduced_rows(self):
        """Rows of the reduced row echelon form, sorted by pivot."""
        keys = sorted(self.pivots, reverse=True)
        done = {}
        for p in keys:
            row = dict(self.pivots[p])
            for q in [k for k in row if k != p and k in done]:
                c = row.get(q)
                if c:
                    addto(row, done[q], -c)
            done[p] = row
        return [done[p] for p in sorted(done)]


def rref(m: SparseMatrix):
    """Reduced row echelon form, rank and pivot columns of ``m``."""
    ech = Echelon()
    for i in range(m.rows):
        r = m.row(i)
        if r:
            ech.add(r)
    rows = ech.fully_reduced_rows()
    pivots = [min(r) for r in rows]
    return SparseMatrix.from_rows(m.rows, m.cols, rows), len(rows), pivots


def rank(m: SparseMatrix) -> int:
    return rref(m)[1]


def rank_of_vectors(vectors) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return len(ech)


def solve(m: SparseMatrix, b):
    """
    One exact solution of m x = b, or None when inconsistent.

    Free variables are zero; pivot variables are read off the reduced system.
    """
    if len(b) != m.rows:
        raise ValueError("right-hand side has wrong length")
    aug = m.cols
    ech = Echelon()
    for i in range(m.rows):
        r = m.row(i)
        if b[i]:
            r[aug] = Fraction(b[i])
        if r:
            ech.add(r)
    rows = ech.fully_reduced_rows()
    x = [Fraction(0)] * m.cols
    for r in rows:
        p = min(r)
        if p == aug:
            return None
        x[p] = r.get(aug, Fraction(0))
    return x


def solve_columns(columns, target):
    """
    Express ``target`` as a combination of the dict vectors ``columns``.

    Returns ``{column index: coef}`` or None.  Columns are consumed in order,
    so the solution only uses the earliest independent columns (later,
    dependent columns get coefficient zero).
    """
    ech = Echelon(track=True)
    for c in columns:
        ech.add(c)
    combo = {}
    rest = ech.reduce(target, combo)
    if rest:
        return None
    # reduce() subtracted the rows; the solution is the negated combination
    return {k: -v for k, v in combo.items() if v}


def kernel_of_columns(columns):
    """Basis of {x : sum_j x_j columns[j] = 0}, as dicts over column indices."""
    ech = Echelon(track=True)
    out = []
    for c in columns:
        if not ech.add(c):
            out.append(ech._last_dependency)
    return out
