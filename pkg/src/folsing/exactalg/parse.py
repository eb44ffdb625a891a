"""Parser for the polynomial text grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' number))*
    factor := atom ['^' integer]
    atom   := number | name | '(' expr ')'

Names are the coordinate variables ``x y t u v`` or declared parameters.
Implicit multiplication (``2x``, ``x y``) is rejected.  A one-form is a sum
of ``(expr) dx`` / ``(expr) dy`` pieces.
"""

from __future__ import annotations

import re

from gmpy2 import mpq

from .numbers import Q
from .poly import MultiPoly

COORDS = ("x", "y", "t", "u", "v")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class ParseError(Exception):
    def __init__(self, msg, text="", pos=0):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line = line
        self.column = col


class _Tok:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind, self.value, self.pos = kind, value, pos


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(1) is not None:
            toks.append(_Tok("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            toks.append(_Tok("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            toks.append(_Tok("op", ch, m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", None, n))
    return toks


class _Parser:
    def __init__(self, text, gens, params, markers=False):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.gens = tuple(gens)
        self.params = dict(params or {})
        self.markers = markers

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok.pos)

    def expect(self, value):
        t = self.peek()
        if t.kind != "op" or t.value != value:
            self.error(f"expected {value!r}")
        return self.take()

    def _adjacent_check(self):
        t = self.peek()
        if t.kind in ("num", "name") or (t.kind == "op" and t.value == "("):
            if self.markers and t.kind == "name" and t.value in ("dx", "dy"):
                return
            self.error("implicit multiplication is not allowed; use '*'")

    def expr(self):
        sign = 1
        t = self.peek()
        if t.kind == "op" and t.value in "+-":
            self.take()
            sign = -1 if t.value == "-" else 1
        acc = self.term() * sign
        while True:
            t = self.peek()
            if t.kind == "op" and t.value in "+-":
                self.take()
                v = self.term()
                acc = acc + v if t.value == "+" else acc - v
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.value == "*":
                self.take()
                nt = self.peek()
                if self.markers and nt.kind == "name" and nt.value in ("dx", "dy"):
                    self.i -= 1
                    return acc
                acc = acc * self.factor()
            elif t.kind == "op" and t.value == "/":
                self.take()
                d = self.number_atom()
                if not d:
                    self.error("division by zero")
                acc = acc / d
            else:
                self._adjacent_check()
                return acc

    def number_atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return mpq(t.value)
        if t.kind == "op" and t.value == "(":
            start = self.peek()
            self.take()
            v = self.expr()
            self.expect(")")
            if not v.is_constant():
                self.error("division only by numeric constants", start)
            return v.constant_term()
        self.error("expected a number after '/'")

    def factor(self):
        base = self.atom()
        t = self.peek()
        if t.kind == "op" and t.value == "^":
            self.take()
            e = self.peek()
            if e.kind != "num":
                self.error("exponent must be a non-negative integer")
            self.take()
            base = base ** e.value
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return MultiPoly.const(self.gens, t.value)
        if t.kind == "name":
            self.take()
            name = t.value
            if name in self.gens:
                return MultiPoly.var(self.gens, name)
            if name in self.params:
                val = self.params[name]
                if isinstance(val, MultiPoly):
                    return val.with_gens(self.gens)
                return MultiPoly.const(self.gens, val)
            if self.markers and name in ("dx", "dy"):
                self.error(f"misplaced differential {name}", t)
            self.error(f"unknown name {name!r}", t)
        if t.kind == "op" and t.value == "(":
            self.take()
            v = self.expr()
            self.expect(")")
            return v
        if t.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {t.value!r}")


def parse_poly(text: str, gens=("x", "y"), params=None) -> MultiPoly:
    """Parse a polynomial over the given generators.

    ``params`` maps declared parameter names to values (scalars or
    MultiPoly); a parameter that should stay symbolic belongs in ``gens``.
    """
    p = _Parser(text, gens, params)
    if p.peek().kind == "end":
        p.error("empty expression")
    v = p.expr()
    if p.peek().kind != "end":
        p.error(f"unexpected token {p.peek().value!r}")
    return v


def parse_form_parts(text: str, gens=("x", "y"), params=None):
    """Parse ``(P) dx + (Q) dy`` into the pair (P, Q).

    Pieces may repeat and appear in any order; a bare ``dx`` has coefficient
    1 and ``expr*dx`` is also accepted.
    """
    p = _Parser(text, gens, params, markers=True)
    P = MultiPoly.zero(p.gens)
    Qp = MultiPoly.zero(p.gens)
    seen = False
    while p.peek().kind != "end":
        sign = 1
        t = p.peek()
        if t.kind == "op" and t.value in "+-":
            p.take()
            sign = -1 if t.value == "-" else 1
        elif seen:
            p.error("expected '+' or '-' between form pieces")
        t = p.peek()
        if t.kind == "name" and t.value in ("dx", "dy"):
            coeff = MultiPoly.const(p.gens, 1)
        else:
            coeff = p.term()
            t = p.peek()
            if t.kind == "op" and t.value == "*":
                p.take()
        t = p.peek()
        if not (t.kind == "name" and t.value in ("dx", "dy")):
            p.error("expected dx or dy after a coefficient")
        p.take()
        if t.value == "dx":
            P = P + coeff * sign
        else:
            Qp = Qp + coeff * sign
        seen = True
    if not seen:
        p.error("empty one-form")
    return P, Qp


def parse_rational(text: str) -> mpq:
    text = text.strip()
    try:
        return Q(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational literal {text!r}", text, 0) from exc
