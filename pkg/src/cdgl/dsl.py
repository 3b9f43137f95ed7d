"""
Line-oriented description language for cdgl presentations.

    # the disk
    generator x : 0
    generator y : 1
    d y = x
    sub M = { x }
    filtration { x, y } { y }
    truncate 6
    window -2..8
    wedge 6
    scenario classify-cell

Expressions are rational linear combinations of nested brackets over
generator names: ``1/2 [x1, x1] - [x1, [x1, x2]]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core.complexes import DegreeWindow
from .errors import DslSyntaxError, UnknownGenerator

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(\.\.)|(.))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*$")


class _Lexer:
    def __init__(self, text, line, offset=0):
        self.text = text
        self.line = line
        self.offset = offset
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            col = m.start() + len(m.group(0)) - len(m.group(0).lstrip()) + 1 + offset
            if m.group(1):
                self.toks.append(("num", m.group(1), col))
            elif m.group(2):
                self.toks.append(("id", m.group(2), col))
            elif m.group(3):
                self.toks.append(("sym", "..", col))
            elif m.group(4):
                if not m.group(4).isspace():
                    self.toks.append(("sym", m.group(4), col))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text) + 1 + self.offset)

    def next(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, kind, value=None):
        t = self.next()
        if t[0] != kind or (value is not None and t[1] != value):
            want = value if value is not None else kind
            raise DslSyntaxError(f"expected {want!r}, found {t[1]!r}", self.line, t[2])
        return t

    def done(self):
        return self.i >= len(self.toks)


# expression nodes: ("gen", name, line, col) | ("br", a, b) | ("sum", [(Fraction, node)])

def _parse_sum(lx):
    terms = []
    sign = 1
    t = lx.peek()
    if t[1] in "+-" and t[0] == "sym":
        lx.next()
        sign = -1 if t[1] == "-" else 1
    terms.append(_parse_term(lx, sign))
    while True:
        t = lx.peek()
        if t[0] == "sym" and t[1] in ("+", "-"):
            lx.next()
            terms.append(_parse_term(lx, -1 if t[1] == "-" else 1))
        else:
            break
    return ("sum", terms)


def _parse_term(lx, sign):
    coef = Fraction(sign)
    t = lx.peek()
    if t[0] == "num":
        lx.next()
        coef *= Fraction(t[1])
        nxt = lx.peek()
        if nxt[0] == "sym" and nxt[1] == "*":
            lx.next()
            nxt = lx.peek()
        if not (nxt[0] == "id" or (nxt[0] == "sym" and nxt[1] in "[(")):
            if coef == 0:
                return (coef, None)
            raise DslSyntaxError("a scalar must multiply a bracket or generator", lx.line, nxt[2])
    return (coef, _parse_atom(lx))


def _parse_atom(lx):
    t = lx.next()
    if t[0] == "id":
        return ("gen", t[1], lx.line, t[2])
    if t[0] == "sym" and t[1] == "[":
        a = _parse_sum(lx)
        lx.expect("sym", ",")
        b = _parse_sum(lx)
        lx.expect("sym", "]")
        return ("br", a, b)
    if t[0] == "sym" and t[1] == "(":
        a = _parse_sum(lx)
        lx.expect("sym", ")")
        return a
    raise DslSyntaxError(f"unexpected {t[1]!r}", lx.line, t[2])


def _names_in(node, out):
    if node is None:
        return out
    if node[0] == "gen":
        out.append(node)
    elif node[0] == "br":
        _names_in(node[1], out)
        _names_in(node[2], out)
    else:
        for _, n in node[1]:
            _names_in(n, out)
    return out


def evaluate(node, p):
    """Evaluate an expression tree to a GradedLieElement of presentation p."""
    if node is None:
        return p.zero()
    kind = node[0]
    if kind == "gen":
        if node[1] not in p.index:
            raise UnknownGenerator(node[1], node[2], node[3])
        return p.gen(node[1])
    if kind == "br":
        return evaluate(node[1], p).bracket(evaluate(node[2], p))
    acc = p.zero()
    for c, n in node[1]:
        if c and n is not None:
            acc = acc + evaluate(n, p) * c
    return acc


def render_expr(node):
    if node is None:
        return "0"
    if node[0] == "gen":
        return node[1]
    if node[0] == "br":
        return f"[{render_expr(node[1])}, {render_expr(node[2])}]"
    out = ""
    for k, (c, n) in enumerate(node[1]):
        neg = c < 0
        a = abs(c)
        body = render_expr(n)
        if n is not None and n[0] == "sum":
            body = f"({body})"
        piece = body if (a == 1 and n is not None) else (f"{a}" if n is None else f"{a} {body}")
        if k == 0:
            out = ("-" if neg else "") + piece
        else:
            out += (" - " if neg else " + ") + piece
    return out or "0"


def parse_expression(text, p=None, line=1, offset=0):
    lx = _Lexer(text, line, offset)
    node = _parse_sum(lx)
    if not lx.done():
        t = lx.peek()
        raise DslSyntaxError(f"unexpected {t[1]!r}", line, t[2])
    return evaluate(node, p) if p is not None else node


# ---------------------------------------------------------------------------

@dataclass
class ModelScript:
    name: str = None
    generators: list = field(default_factory=list)       # [(name, degree)]
    differentials: dict = field(default_factory=dict)    # name -> expression tree
    sub: tuple = None                                    # (label, [names])
    filtration: list = None                              # [[names], ...]
    truncation: int = None
    window: DegreeWindow = None
    wedge: int = None
    scenarios: list = field(default_factory=list)
    positions: dict = field(default_factory=dict, repr=False, compare=False)

    def presentation(self, truncation=None, window=None, strict=True):
        from .freelie import CdglPresentation
        N = truncation or self.truncation or 6
        w = window or self.window
        gens = list(self.generators)
        diffs = {n: (lambda p, node=node: evaluate(node, p)) for n, node in self.differentials.items()}
        return CdglPresentation(gens, diffs, truncation=N, window=w,
                                filtration=self.filtration,
                                sub=self.sub[1] if self.sub else None,
                                strict=strict, name=self.name)


def parse_model(text) -> ModelScript:
    s = ModelScript()
    declared = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        lx = _Lexer(line, ln)
        kw = lx.next()
        if kw[0] != "id":
            raise DslSyntaxError(f"expected a directive, found {kw[1]!r}", ln, kw[2])
        word = kw[1]
        if word == "generator":
            name = lx.expect("id")
            lx.expect("sym", ":")
            degree = _signed_int(lx)
            if name[1] in declared:
                raise DslSyntaxError(f"generator {name[1]!r} declared twice", ln, name[2])
            declared[name[1]] = degree
            s.generators.append((name[1], degree))
        elif word == "d":
            name = lx.expect("id")
            eq = lx.expect("sym", "=")
            rest = line[eq[2]:]
            lx2 = _Lexer(rest, ln, eq[2])
            node = _parse_sum(lx2)
            if not lx2.done():
                t = lx2.peek()
                raise DslSyntaxError(f"unexpected {t[1]!r}", ln, t[2])
            if name[1] in s.differentials:
                raise DslSyntaxError(f"differential of {name[1]!r} given twice", ln, name[2])
            s.differentials[name[1]] = node
            s.positions[name[1]] = (ln, name[2])
            lx.i = len(lx.toks)
        elif word == "sub":
            label = lx.expect("id")
            lx.expect("sym", "=")
            s.sub = (label[1], _name_set(lx))
        elif word == "filtration":
            levels = []
            while not lx.done():
                levels.append(_name_set(lx))
            s.filtration = levels
        elif word == "truncate":
            s.truncation = int(lx.expect("num")[1])
        elif word == "wedge":
            s.wedge = int(lx.expect("num")[1])
        elif word == "window":
            lo = _signed_int(lx)
            lx.expect("sym", "..")
            hi = _signed_int(lx)
            s.window = DegreeWindow(lo, hi)
        elif word == "name":
            s.name = lx.expect("id")[1]
        elif word == "scenario":
            parts = []
            while not lx.done():
                parts.append(lx.next()[1])
            s.scenarios.append("".join(parts))
        else:
            raise DslSyntaxError(f"unknown directive {word!r}", ln, kw[2])
        if not lx.done():
            t = lx.peek()
            raise DslSyntaxError(f"unexpected {t[1]!r}", ln, t[2])
    # every referenced name must be declared
    for gname, node in s.differentials.items():
        if gname not in declared:
            ln, col = s.positions[gname]
            raise UnknownGenerator(gname, ln, col)
        for ref in _names_in(node, []):
            if ref[1] not in declared:
                raise UnknownGenerator(ref[1], ref[2], ref[3])
    for names in ([s.sub[1]] if s.sub else []) + (s.filtration or []):
        for n in names:
            if n not in declared:
                raise UnknownGenerator(n)
    return s


def _signed_int(lx):
    t = lx.next()
    sign = 1
    if t[0] == "sym" and t[1] == "-":
        sign = -1
        t = lx.next()
    if t[0] != "num" or "/" in t[1]:
        raise DslSyntaxError(f"expected an integer, found {t[1]!r}", lx.line, t[2])
    return sign * int(t[1])


def _name_set(lx):
    lx.expect("sym", "{")
    names = []
    if lx.peek()[1] != "}":
        names.append(lx.expect("id")[1])
        while lx.peek()[1] == ",":
            lx.next()
            names.append(lx.expect("id")[1])
    lx.expect("sym", "}")
    return names


def render(s: ModelScript) -> str:
    lines = []
    if s.name:
        lines.append(f"name {s.name}")
    for n, d in s.generators:
        lines.append(f"generator {n} : {d}")
    for n, _ in s.generators:
        if n in s.differentials:
            lines.append(f"d {n} = {render_expr(s.differentials[n])}")
    if s.sub:
        lines.append(f"sub {s.sub[0]} = {{ {', '.join(s.sub[1])} }}")
    if s.filtration:
        lines.append("filtration " + " ".join("{ " + ", ".join(l) + " }" for l in s.filtration))
    if s.truncation is not None:
        lines.append(f"truncate {s.truncation}")
    if s.window is not None:
        lines.append(f"window {s.window.min_degree}..{s.window.max_degree}")
    if s.wedge is not None:
        lines.append(f"wedge {s.wedge}")
    for sc in s.scenarios:
        lines.append(f"scenario {sc}")
    return "\n".join(lines) + "\n"
