"""Numeric evaluation of expressions on scalars or numpy arrays."""

import math

import numpy as np

from .. import special
from ..errors import DomainError, UnboundSymbol
from .core import Func, JetVar, Power, Product, Rational, Sum, Symbol, as_expr

CONSTANTS = {"pi": math.pi}


def _scalar_pow(b, x):
    if b == 0.0 and x < 0:
        raise DomainError("division by zero")
    if b < 0 and not float(x).is_integer():
        raise DomainError(f"negative base {b} raised to non-integer power {x}")
    try:
        return b**x
    except OverflowError:
        return math.inf


def _scalar_func(name, a):
    if name == "exp":
        try:
            return math.exp(a)
        except OverflowError:
            return math.inf
    if name == "ln":
        if a <= 0:
            raise DomainError(f"ln of non-positive value {a}")
        return math.log(a)
    if name == "erf":
        return special.erf(a)
    if name == "lambertW":
        return special.lambert_w(a)
    if name == "abs":
        return abs(a)
    if name == "sqrt":
        if a < 0:
            raise DomainError(f"sqrt of negative value {a}")
        return math.sqrt(a)
    raise ValueError(name)


def _array_func(name, a):
    if name == "exp":
        return np.exp(a)
    if name == "ln":
        return np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), np.nan)
    if name == "erf":
        return special.erf(a)
    if name == "lambertW":
        return special.lambert_w(a)
    if name == "abs":
        return np.abs(a)
    if name == "sqrt":
        return np.sqrt(a)
    raise ValueError(name)


def evaluate(e, binding, strict=True):
    """Evaluate ``e`` with numeric values for every free name.

    With ``strict=True`` values are Python floats and domain violations raise
    DomainError.  With ``strict=False`` values may be numpy arrays; invalid
    points come out as NaN or inf.
    """
    e = as_expr(e)
    env = {}
    for k, v in binding.items():
        env[k if isinstance(k, str) else k.name] = v
    memo = {}

    def rec(n):
        hit = memo.get(n)
        if hit is not None:
            return hit
        if isinstance(n, Rational):
            try:
                out = n.value.numerator / n.value.denominator
            except OverflowError:
                out = math.copysign(math.inf, n.value)
        elif isinstance(n, (Symbol, JetVar)):
            if n.name in env:
                out = env[n.name]
            elif n.name in CONSTANTS:
                out = CONSTANTS[n.name]
            else:
                raise UnboundSymbol(n.name)
            if strict:
                out = float(out)
        elif isinstance(n, Sum):
            out = rec(n.terms[0])
            for t in n.terms[1:]:
                out = out + rec(t)
        elif isinstance(n, Product):
            out = rec(n.factors[0])
            for f in n.factors[1:]:
                out = out * rec(f)
        elif isinstance(n, Power):
            b = rec(n.base)
            x = rec(n.exp)
            if strict:
                out = _scalar_pow(b, x)
            else:
                out = np.power(b, x)
        elif isinstance(n, Func):
            a = rec(n.arg)
            out = _scalar_func(n.name, a) if strict else _array_func(n.name, a)
        else:
            raise TypeError(type(n))
        memo[n] = out
        return out

    if strict:
        try:
            val = rec(e)
        except ZeroDivisionError as exc:
            raise DomainError(str(exc)) from None
        if isinstance(val, complex):
            raise DomainError("complex result")
        return float(val)
    with np.errstate(all="ignore"):
        return rec(e)


def eval_numeric(e, binding):
    """Scalar double-precision value of ``e`` under ``binding``."""
    return evaluate(e, binding, strict=True)
