"""Finite chain complexes over Q and their homology in a degree window."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import WindowTooNarrow
from .linalg import Echelon, SparseMatrix, kernel_of_columns, lincomb


@dataclass(frozen=True)
class DegreeWindow:
    min_degree: int
    max_degree: int

    def __post_init__(self):
        if self.min_degree > self.max_degree:
            raise ValueError("empty degree window")

    def __contains__(self, n):
        return self.min_degree <= n <= self.max_degree

    def degrees(self):
        return range(self.min_degree, self.max_degree + 1)

    def __str__(self):
        return f"{self.min_degree}..{self.max_degree}"

    @classmethod
    def parse(cls, text):
        lo, hi = text.split("..")
        return cls(int(lo), int(hi))


@dataclass
class HomologyData:
    degree: int
    betti: int
    cycles: list      # basis of ker d_n, dicts over degree-n positions
    boundaries: list  # basis of im d_{n+1}
    representatives: list  # cycles completing the boundaries to a basis of ker


class ChainComplex:
    """
    Degreewise finite complex.

    ``labels[n]`` lists the basis of degree n; ``diff[n]`` is the list of
    images of those basis vectors, each a dict over positions in degree n-1.
    Degrees missing from ``labels`` but inside the window are zero.
    """

    def __init__(self, labels, diff, window: DegreeWindow):
        self.window = window
        self.labels = {n: list(labels.get(n, [])) for n in window.degrees()}
        self.diff = {}
        for n in window.degrees():
            cols = diff.get(n)
            if cols is None:
                cols = [{} for _ in self.labels[n]]
            if len(cols) != len(self.labels[n]):
                raise ValueError(f"degree {n}: {len(cols)} images for {len(self.labels[n])} basis elements")
            self.diff[n] = [dict(c) for c in cols]
        self._index = {n: {lab: i for i, lab in enumerate(self.labels[n])} for n in self.labels}
        self._hcache = {}

    def dim(self, n):
        return len(self.labels.get(n, ()))

    def position(self, n, label):
        return self._index[n][label]

    def boundary_matrix(self, n) -> SparseMatrix:
        rows = self.dim(n - 1) if (n - 1) in self.window else 0
        entries = {}
        for j, col in enumerate(self.diff[n]):
            for i, v in col.items():
                entries[(i, j)] = v
        return SparseMatrix(rows, self.dim(n), entries)

    def apply(self, n, vec):
        """Differential of a dict vector of degree n."""
        return lincomb((c, self.diff[n][j]) for j, c in vec.items())

    def check_square_zero(self):
        """List of (degree, position) where d(d(e)) != 0; empty means d^2 = 0."""
        bad = []
        for n in self.window.degrees():
            if n - 2 < self.window.min_degree:
                continue
            for j, col in enumerate(self.diff[n]):
                if self.apply(n - 1, col):
                    bad.append((n, j))
        return bad

    def _require(self, n):
        if n - 1 < self.window.min_degree or n + 1 > self.window.max_degree:
            raise WindowTooNarrow(f"homology in degree {n} needs degrees {n - 1}..{n + 1} inside window {self.window}")

    def homology(self, n) -> HomologyData:
        self._require(n)
        if n in self._hcache:
            return self._hcache[n]
        cycles = kernel_of_columns(self.diff[n])
        ech = Echelon()
        boundaries = []
        for col in self.diff[n + 1]:
            if col and ech.add(col):
                boundaries.append(col)
        reps = []
        for z in cycles:
            if ech.add(z):
                reps.append(z)
        h = HomologyData(n, len(cycles) - len(boundaries), cycles, boundaries, reps)
        self._hcache[n] = h
        return h

    def betti(self, n):
        return self.homology(n).betti

    def homology_class(self, n, vec):
        """
        Coordinates of the class of the cycle ``vec`` in the basis given by
        ``homology(n).representatives``.
        """
        h = self.homology(n)
        ech = Echelon(track=True)
        for b in h.boundaries:
            ech.add(b)
        nb = len(h.boundaries)
        for z in h.representatives:
            ech.add(z)
        combo = {}
        rest = ech.reduce(vec, combo)
        if rest:
            raise ValueError("vector is not a cycle")
        return [-combo.get(nb + i, Fraction(0)) for i in range(len(h.representatives))]

    def is_boundary(self, n, vec):
        self._require(n)
        ech = Echelon()
        for col in self.diff[n + 1]:
            ech.add(col)
        return ech.contains(vec)

    def sub_degrees(self, window):
        return ChainComplex({n: self.labels[n] for n in window.degrees()},
                            {n: self.diff[n] for n in window.degrees()}, window)


def homology(c: ChainComplex, n: int) -> HomologyData:
    return c.homology(n)
