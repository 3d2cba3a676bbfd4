"""Reading and writing polynomials in the plain-text problem syntax.

The grammar is the usual one: integer or ``p/q`` coefficients, ``+ - *``,
``^`` (``**`` is accepted too) and parentheses.  Output is canonical, so
``parse_poly(format_poly(f), R) == f`` always holds.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import PolyElement, PolyRing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


class PolySyntaxError(ValueError):
    """Raised for malformed polynomial text.

    ``position`` is the offset in the text where the problem was noticed
    and ``identifier`` names an unknown variable when that was the cause.
    """

    def __init__(self, message: str, position: int = 0, identifier: str = ""):
        super().__init__(message)
        self.position = position
        self.identifier = identifier


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[:pos]) + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolySyntaxError(f"unexpected character {text[pos:].strip()[:1]!r} in {text!r}", bad)
        num, ident, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", num, start))
        elif ident is not None:
            out.append(("id", ident, start))
        else:
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring
        self.names = {str(s): g for s, g in zip(ring.symbols, ring.gens)}
        self.text = text

    def peek(self):
        if self.i < len(self.toks):
            return self.toks[self.i][:2]
        return (None, None)

    def where(self) -> int:
        if self.i < len(self.toks):
            return self.toks[self.i][2]
        return len(self.text.rstrip())

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, message: str, back: int = 0, identifier: str = ""):
        self.i -= back
        raise PolySyntaxError(message, self.where(), identifier)

    def expect(self, value):
        kind, val = self.take()
        if val != value:
            self.fail(f"expected {value!r} in {self.text!r}", 1)

    def parse(self) -> PolyElement:
        if not self.toks:
            raise PolySyntaxError("empty polynomial", 0)
        f = self.expr()
        if self.i != len(self.toks):
            self.fail(f"trailing input in {self.text!r}")
        return f

    def expr(self) -> PolyElement:
        sign = 1
        kind, val = self.peek()
        if val in ("+", "-"):
            self.take()
            sign = -1 if val == "-" else 1
        f = self.term() * sign
        while self.peek()[1] in ("+", "-"):
            _, op = self.take()
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> PolyElement:
        f = self.power()
        while self.peek()[1] in ("*", "/"):
            _, op = self.take()
            if op == "*":
                f = f * self.power()
            else:
                d = self.power()
                if not d.is_ground or d.is_zero:
                    self.fail(f"division by a non-constant in {self.text!r}", 1)
                f = f.quo_ground(d.LC)
        return f

    def power(self) -> PolyElement:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            if kind != "num":
                self.fail(f"exponent must be a nonnegative integer in {self.text!r}", 1)
            return base ** int(val)
        return base

    def atom(self) -> PolyElement:
        kind, val = self.take()
        if kind == "num":
            return self.ring(QQ(int(val)))
        if kind == "id":
            if val not in self.names:
                self.fail(f"unknown variable {val!r}", 1, val)
            return self.names[val]
        if val == "(":
            f = self.expr()
            self.expect(")")
            return f
        if val == "-":
            return -self.atom()
        self.fail(f"unexpected token {val!r} in {self.text!r}", 1)


def parse_poly(text: str, ring: PolyRing) -> PolyElement:
    """Parse ``text`` into an element of ``ring``."""
    return _Parser(text, ring).parse()


def format_coefficient(c) -> str:
    if hasattr(c, "numerator") and hasattr(c, "denominator"):
        q = Fraction(int(c.numerator), int(c.denominator))
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return "(" + str(c) + ")"


def format_poly(f: PolyElement) -> str:
    """Canonical text for ``f``: terms in decreasing monomial order."""
    if f.is_zero:
        return "0"
    names = [str(s) for s in f.ring.symbols]
    parts = []
    for monom, coeff in f.terms():
        neg = coeff < 0 if f.ring.domain.is_QQ or f.ring.domain.is_ZZ else False
        mag = -coeff if neg else coeff
        factors = []
        for name, e in zip(names, monom):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        c = format_coefficient(mag)
        if not factors:
            body = c
        elif c == "1":
            body = "*".join(factors)
        else:
            body = c + "*" + "*".join(factors)
        parts.append(("-" if neg else "+", body))
    head_sign, head = parts[0]
    text = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text
