"""Deterministic text rendering in the same grammar the parser reads."""

import re

from .core import Func, JetVar, Power, Product, Rational, Sum, Symbol, _split_term

_SHORTHAND_SUFFIX = re.compile(r"^[xt]+$")


def _rational(v):
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _jetvar(j):
    if j.index and all(i in ("x", "t") for i in j.index) and "_" not in j.dep[-1:]:
        return j.dep + "_" + "".join(j.index)
    if not j.index:
        return f"Diff({j.dep})"
    return "Diff(" + ", ".join((j.dep,) + j.index) + ")"


def _atom(e):
    """Render ``e`` so it can stand as a power base."""
    if isinstance(e, Rational):
        v = e.value
        if v >= 0 and v.denominator == 1:
            return str(v.numerator)
        return f"({_rational(v)})"
    if isinstance(e, (Symbol, JetVar, Func)):
        return to_text(e)
    return f"({to_text(e)})"


def _exponent(x):
    if isinstance(x, Rational) and x.value >= 0 and x.value.denominator == 1:
        return str(x.value.numerator)
    return f"({to_text(x)})"


def _factor(f):
    if isinstance(f, Power):
        return f"{_atom(f.base)}^{_exponent(f.exp)}"
    return _atom(f)


def _monomial(factors):
    return "*".join(_factor(f) for f in factors)


def _term(t):
    """Render one additive term; returns (is_negative, text of |term|)."""
    if isinstance(t, Rational):
        v = t.value
        return v < 0, _rational(abs(v))
    c, fs = _split_term(t)
    if isinstance(t, Product):
        factors = t.factors[1:] if isinstance(t.factors[0], Rational) else t.factors
    else:
        factors = (t,)
    mono = _monomial(factors)
    neg = c < 0
    c = abs(c)
    if c == 1:
        return neg, mono
    return neg, f"{_rational(c)}*{mono}"


def to_text(e):
    if isinstance(e, Rational):
        return _rational(e.value)
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, JetVar):
        return _jetvar(e)
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Power):
        return _factor(e)
    if isinstance(e, Product):
        neg, body = _term(e)
        return "-" + body if neg else body
    if isinstance(e, Sum):
        parts = []
        for i, t in enumerate(e.terms):
            neg, body = _term(t)
            if i == 0:
                parts.append("-" + body if neg else body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)
    raise TypeError(type(e))
