"""Tiny inline expression grammar for polynomials.

Grammar (ASCII, whitespace ignored):

    expr   := ['-'] term ( ('+'|'-') term )*
    term   := factor ( '*' factor )*
    factor := atom [ '^' integer ]
    atom   := rational | variable | '|x|' | '|u|' | '(' expr ')'

where rational is int or int/int and variable is x<i> or u<i> with
1 <= i <= m.  '|x|' and '|u|' denote the Euclidean norms; odd powers of
them are rejected since only even powers are polynomial.
"""

import re

from gmpy2 import mpq

from .polynomials import PolyXU

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>[xu]\d+)|(?P<norm>\|[xu]\|)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    pass


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos and not text[pos:].strip():
            break
        if not mt:
            raise ParseError("bad character at %r" % text[pos:])
        pos = mt.end()
        if mt.group("num"):
            out.append(("num", int(mt.group("num"))))
        elif mt.group("var"):
            out.append(("var", mt.group("var")))
        elif mt.group("norm"):
            out.append(("norm", mt.group("norm")[1]))
        elif mt.group("op"):
            out.append(("op", mt.group("op")))
    if text[pos:].strip():
        raise ParseError("bad character at %r" % text[pos:].strip())
    return out


class _Parser:
    def __init__(self, tokens, m):
        self.toks = tokens
        self.i = 0
        self.m = m

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError("expected %r" % op)

    def parse_expr(self):
        if self.peek() == ("op", "-"):
            self.take()
            acc = -self.parse_term()
        else:
            acc = self.parse_term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            t = self.parse_term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def parse_term(self):
        acc = self.parse_factor()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
                acc = acc * self.parse_factor()
            elif (kind, val) == ("op", "/"):
                self.take()
                k2, v2 = self.take()
                if k2 != "num" or v2 == 0:
                    raise ParseError("division only by a nonzero integer")
                acc = acc.scale(mpq(1, v2))
            elif kind in ("num", "var", "norm") or (kind, val) == ("op", "("):
                # juxtaposition, e.g. "3x1^2u1"
                acc = acc * self.parse_factor()
            else:
                return acc

    def parse_factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.parse_factor()
        base = self.parse_atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer")
            if isinstance(base, _NormTag):
                if val % 2:
                    raise ParseError("odd powers of |%s| are not polynomial" % base.block)
                return _pow(PolyXU.norm_sq(self.m, base.block), val // 2, self.m)
            return _pow(base, val, self.m)
        if isinstance(base, _NormTag):
            raise ParseError("|%s| must carry an even power" % base.block)
        return base

    def parse_atom(self):
        kind, val = self.take()
        if kind == "num":
            num = val
            if self.peek() == ("op", "/"):
                self.take()
                k2, v2 = self.take()
                if k2 != "num" or v2 == 0:
                    raise ParseError("bad rational denominator")
                return PolyXU.constant(self.m, mpq(num, v2))
            return PolyXU.constant(self.m, num)
        if kind == "var":
            block, idx = val[0], int(val[1:])
            if not 1 <= idx <= self.m:
                raise ParseError("variable %s out of range for m=%d" % (val, self.m))
            return PolyXU.variable(self.m, block, idx)
        if kind == "norm":
            return _NormTag(val)
        if (kind, val) == ("op", "("):
            inner = self.parse_expr()
            self.expect_op(")")
            return inner
        raise ParseError("unexpected token %r" % ((kind, val),))


class _NormTag:
    def __init__(self, block):
        self.block = block


def _pow(p, n, m):
    out = PolyXU.constant(m, 1)
    for _ in range(n):
        out = out * p
    return out


def parse_poly(text, m):
    """Parse an inline polynomial expression into a PolyXU."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty expression")
    parser = _Parser(toks, m)
    result = parser.parse_expr()
    if parser.i != len(toks):
        raise ParseError("trailing input after expression")
    return result
