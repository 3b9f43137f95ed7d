"""
Built-in models.  Each entry is DSL text plus a one-line provenance note
that the CLI prints in report headers.
"""

from __future__ import annotations

from .dsl import parse_model


def disk_text(n):
    """S^n ⊂ D^{n+1}: x of degree n-1, y of degree n, dy = x."""
    return (f"name disk{n}\n"
            f"generator x : {n - 1}\n"
            f"generator y : {n}\n"
            "d y = x\n"
            "sub M = { x }\n"
            "filtration { x, y } { x }\n")


TEXTS = {
    "disk1": disk_text(1),
    "disk2": disk_text(2),
    "disk3": disk_text(3),
    "sphere2": "name sphere2\ngenerator a : 1\nfiltration { a }\n",
    "sphere3": "name sphere3\ngenerator a : 2\nfiltration { a }\n",
    "cp2": ("name cp2\n"
            "generator x1 : 1\n"
            "generator x2 : 3\n"
            "d x2 = 1/2 [x1, x1]\n"
            "sub M = { x1 }\n"
            "filtration { x1, x2 } { x1 }\n"),
    "cp3": ("name cp3\n"
            "generator x1 : 1\n"
            "generator x2 : 3\n"
            "generator x3 : 5\n"
            "d x2 = 1/2 [x1, x1]\n"
            "d x3 = [x1, x2]\n"
            "sub M = { x1, x2 }\n"
            "filtration { x1, x2, x3 } { x1, x2 }\n"),
    "wedge": ("name wedge\n"
              "generator a : 1\n"
              "generator x : 3\n"
              "sub M = { a }\n"
              "filtration { a, x } { a }\n"),
    "mctoy": ("name mctoy\n"
              "generator u : -1\n"
              "generator b : -1\n"
              "generator t : 0\n"
              "generator s : 0\n"
              "d u = -1/2 [u, u]\n"
              "d t = b\n"
              "window -3..2\n"),
}

PROVENANCE = {
    "disk1": "boundary of a disk, n = 1 (worked example)",
    "disk2": "boundary of a disk, n = 2",
    "disk3": "boundary of a disk, n = 3",
    "sphere2": "S^2, one generator of degree 1",
    "sphere3": "S^3, one generator of degree 2",
    "cp2": "CP^1 ⊂ CP^2, non-trivial attachment",
    "cp3": "CP^2 ⊂ CP^3, non-trivial attachment",
    "wedge": "S^2 ⊂ S^2 ∨ S^4, trivial attachment",
    "mctoy": "toy algebra with negative degrees for Maurer-Cartan tests",
}

STRUCTURAL = ("disk1", "disk2", "disk3", "sphere2", "sphere3", "cp2", "wedge")
WITH_SUB = ("disk1", "disk2", "disk3", "cp2", "cp3", "wedge")


def script(name):
    return parse_model(TEXTS[name])


def fixture(name, truncation=6, window=None):
    return script(name).presentation(truncation=truncation, window=window)
