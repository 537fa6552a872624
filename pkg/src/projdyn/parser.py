"""Recursive-descent parser for polynomial text.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := factor ('*'? factor)*
    factor   := base ('^' nat)?
    base     := rational | var | '(' expr ')'
    var      := letter (letter | digit)*
    rational := int ('/' nat)?

Whitespace is insignificant and juxtaposition multiplies, so ``x1*x2`` and
``x1 x2`` mean the same thing.  A leading sign on a term is accepted.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .poly import Poly

_NUM = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.column = col
        self.pos = pos


class _Parser:
    def __init__(self, text: str, names: list[str] | None):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            ch = text[pos]
            if ch.isspace():
                pos += 1
                continue
            m = _NUM.match(text, pos) or _NAME.match(text, pos)
            if m:
                self.toks.append(("num" if ch.isdigit() else "var", m.group(0), pos))
                pos = m.end()
            else:
                self.toks.append(("op", ch, pos))
                pos += 1
        self.toks.append(("eof", "", len(text)))
        self.i = 0
        self.fixed = names is not None
        self.names = list(names) if names is not None else []
        # terms are collected in a dict keyed by variable name first, since the
        # variable set may still grow while parsing
        self.index = {n: i for i, n in enumerate(self.names)}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise PolySyntaxError(msg, self.text, tok[2])

    # polynomials as dict: frozenset((name, exp)) -> Fraction

    def expr(self):
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = _scale(self.term(), sign)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                acc = _add(acc, t if val == "+" else _scale(t, -1))
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = _mul(acc, self.factor())
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                acc = _mul(acc, self.factor())
            else:
                return acc

    def factor(self):
        base = self.base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.error("expected a natural-number exponent", tok)
            base = _pow(base, int(tok[1]))
        return base

    def base(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    self.error("expected a denominator", den_tok)
                den = int(den_tok[1])
                if den == 0:
                    self.error("zero denominator", den_tok)
                return {frozenset(): Fraction(num, den)}
            return {frozenset(): Fraction(num)} if num else {}
        if kind == "var":
            if val not in self.index:
                if self.fixed:
                    self.error(f"unknown variable {val!r}", tok)
                self.index[val] = len(self.names)
                self.names.append(val)
            return {frozenset([(val, 1)]): Fraction(1)}
        if kind == "op" and val == "(":
            inner = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                self.error("expected ')'", close)
            return inner
        if kind == "eof":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {val!r}", tok)


def _add(a, b):
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def _scale(a, c):
    return {k: v * c for k, v in a.items()}


def _mul(a, b):
    out = {}
    for ka, va in a.items():
        da = dict(ka)
        for kb, vb in b.items():
            m = dict(da)
            for name, e in kb:
                m[name] = m.get(name, 0) + e
            key = frozenset(m.items())
            s = out.get(key, 0) + va * vb
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def _pow(a, n):
    out = {frozenset(): Fraction(1)}
    for _ in range(n):
        out = _mul(out, a)
    return out


def parse_poly_with_names(text: str, names: Sequence[str] | None = None) -> tuple[Poly, list[str]]:
    """Parse ``text``; with ``names=None`` variables are collected in order of appearance."""
    p = _Parser(text, list(names) if names is not None else None)
    result = p.expr()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}")
    idx = p.index
    n = len(p.names)
    terms = {}
    for key, c in result.items():
        e = [0] * n
        for name, k in key:
            e[idx[name]] = k
        terms[tuple(e)] = c
    return Poly(n, terms), p.names


def parse_poly(text: str, names: Sequence[str] | None = None) -> Poly:
    return parse_poly_with_names(text, names)[0]
