"""Canonical text for forms and multivector fields.

Grammar (whitespace separates a coefficient from its basis part)::

    expr   := ['-'] term (('+' | '-') term)*  |  '0'
    term   := factor ('*' factor)* [basis]  |  basis
    factor := RATIONAL | COORD ['^' INT]
    basis  := dCOORD ('^' dCOORD)*          (forms)
            | d/dCOORD ('^' d/dCOORD)*      (multivector fields)

Example: ``1/2*y dz - 1/2*z dy`` or ``-x^2*y d/dx^d/dz``.  Rendering sorts
terms by index tuple and then graded-lex monomial order.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .exalg import PolyForm, PolyMultivector, _Sparse, glex_key, sort_sign


class ParseError(ValueError):
    def __init__(self, msg: str, col: int | None = None):
        self.col = col
        self.msg = msg
        super().__init__(msg if col is None else f"{msg} (column {col + 1})")


def default_names(dim: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(dim))


def _fmt_rat(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_monomial(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, exps):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def render(obj: _Sparse, names: Sequence[str] | None = None) -> str:
    names = tuple(names) if names else default_names(obj.dim)
    prefix = "d/d" if isinstance(obj, PolyMultivector) else "d"
    items = sorted(obj.terms.items(), key=lambda kv: (kv[0][0], glex_key(kv[0][1])))
    if not items:
        return "0"
    out = []
    for n, ((idx, e), c) in enumerate(items):
        mono = render_monomial(e, names)
        basis = "^".join(prefix + names[i] for i in idx)
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{_fmt_rat(a)}*{mono}"
        else:
            body = "" if (a == 1 and basis) else _fmt_rat(a)
        text = " ".join(p for p in (body, basis) if p)
        if n == 0:
            out.append(("-" if c < 0 else "") + text)
        else:
            out.append((" - " if c < 0 else " + ") + text)
    return "".join(out)


_TOKEN = re.compile(
    r"\s*(?:(?P<vec>d/d[A-Za-z_]\w*)|(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_]\w*)|(?P<op>[-+*^]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos + len(text[pos:]) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return toks


def parse(text: str, names: Sequence[str], kind: str = "form") -> _Sparse:
    """Parse ``text`` into a :class:`PolyForm` (``kind='form'``) or a
    :class:`PolyMultivector` (``kind='vector'``)."""
    names = tuple(names)
    dim = len(names)
    index = {n: i for i, n in enumerate(names)}
    cls = PolyForm if kind == "form" else PolyMultivector
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression", 0)
    if len(toks) == 1 and toks[0][1] == "0":
        return cls(dim, 0)

    def basis_index(tok):
        t, v, col = tok
        if kind == "form" and t == "ident" and v.startswith("d") and v[1:] in index and v not in index:
            return index[v[1:]]
        if kind == "vector" and t == "vec" and v[3:] in index:
            return index[v[3:]]
        return None

    pos = 0
    terms: dict = {}
    degree = None

    def peek():
        return toks[pos] if pos < len(toks) else None

    sign = 1
    if peek() and peek()[1] in "+-" and peek()[0] == "op":
        sign = -1 if peek()[1] == "-" else 1
        pos += 1
    while True:
        coeff = Fraction(sign)
        exps = [0] * dim
        idx: list[int] = []
        saw_factor = False
        tok = peek()
        if tok is None:
            raise ParseError("expected a term", len(text))
        if basis_index(tok) is None:
            while True:
                tok = peek()
                if tok is None:
                    raise ParseError("expected a factor", len(text))
                t, v, col = tok
                if t == "num":
                    coeff *= Fraction(v)
                    pos += 1
                elif t == "ident" and v in index:
                    pos += 1
                    k = 1
                    nxt = peek()
                    if nxt and nxt[1] == "^" and pos + 1 < len(toks) and toks[pos + 1][0] == "num":
                        k = int(toks[pos + 1][1])
                        pos += 2
                    exps[index[v]] += k
                else:
                    raise ParseError(f"unknown symbol {v!r}", col)
                saw_factor = True
                nxt = peek()
                if nxt and nxt[0] == "op" and nxt[1] == "*":
                    pos += 1
                    continue
                break
        tok = peek()
        if tok is not None and basis_index(tok) is not None:
            while True:
                tok = peek()
                b = basis_index(tok) if tok else None
                if b is None:
                    raise ParseError("expected a basis symbol", tok[2] if tok else len(text))
                idx.append(b)
                pos += 1
                nxt = peek()
                if nxt and nxt[0] == "op" and nxt[1] == "^":
                    pos += 1
                    continue
                break
        elif not saw_factor:
            raise ParseError("expected a term", tok[2] if tok else len(text))
        if degree is None:
            degree = len(idx)
        elif degree != len(idx):
            raise ParseError(f"mixed degrees {degree} and {len(idx)}", toks[pos - 1][2])
        s, I = sort_sign(idx)
        if s:
            key = (I, tuple(exps))
            terms[key] = terms.get(key, 0) + s * coeff
        tok = peek()
        if tok is None:
            break
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
            continue
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return cls(dim, degree, terms)
