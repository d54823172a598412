"""Recursive-descent parser for the expression grammar.

    expr   := term (("+"|"-") term)*
    term   := unary (("*"|"/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          right-associative
    atom   := NUMBER | IDENT | IDENT "(" expr ("," expr)* ")" | "(" expr ")"

Identifiers of the form ``name_suffix`` with suffix in {x,t}+ are jet
variables; ``Diff(u, x, 2)`` is the long form.  ``e`` is exp(1).
"""

import re
from fractions import Fraction

from ..errors import ParseError
from .core import FUNCTIONS, JetVar, Rational, Symbol, add, func, mul, neg, pow_, MINUS_ONE

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")
_JET = re.compile(r"^(.+?)_([xt]+)$")


def _tokenize(text):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", _byte_offset(text, m.start(3)))
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _byte_offset(text, i):
    return len(text[:i].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, _byte_offset(self.text, tok[2]))

    def expect(self, op):
        t = self.peek()
        if t[0] != "op" or t[1] != op:
            what = "end of input" if t[0] == "end" else repr(t[1])
            self.fail(f"expected {op!r}, found {what}")
        return self.take()

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self):
        parts = [self.term()]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            parts.append(t if op == "+" else neg(t))
        return parts[0] if len(parts) == 1 else add(*parts)

    def term(self):
        parts = [self.unary()]
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            r = self.unary()
            parts.append(r if op == "*" else pow_(r, MINUS_ONE))
        return parts[0] if len(parts) == 1 else mul(*parts)

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return pow_(base, self.unary())
        return base

    def atom(self):
        kind, val, _ = tok = self.take()
        if kind == "num":
            return Rational(Fraction(val) if "." in val else Fraction(int(val)))
        if kind == "id":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                return self.call(val, tok)
            return _identifier(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(val)
        self.fail(f"unexpected {what}", tok)

    def call(self, name, tok):
        if name != "Diff" and name not in FUNCTIONS:
            self.fail(f"unknown function {name!r}", tok)
        self.expect("(")
        if name == "Diff":
            return self.diff_args(tok)
        arg = self.expr()
        if self.peek()[0] == "op" and self.peek()[1] == ",":
            self.fail(f"{name} takes one argument")
        self.expect(")")
        return func(name, arg)

    def diff_args(self, tok):
        t = self.take()
        if t[0] != "id":
            self.fail("Diff expects a dependent-variable name", t)
        dep = t[1]
        index = []
        while self.peek()[0] == "op" and self.peek()[1] == ",":
            self.take()
            t = self.take()
            if t[0] == "id":
                index.append(t[1])
            elif t[0] == "num" and index and "." not in t[1]:
                count = int(t[1])
                if count < 1:
                    self.fail("derivative count must be positive", t)
                index.extend([index[-1]] * (count - 1))
            else:
                self.fail("bad Diff argument", t)
        self.expect(")")
        return JetVar(dep, index)


def _identifier(name):
    if name == "e":
        return func("exp", Rational(1))
    m = _JET.match(name)
    if m:
        return JetVar(m.group(1), tuple(m.group(2)))
    return Symbol(name)


def parse(text):
    """Parse ``text`` into a canonical expression."""
    return _Parser(text).parse()
