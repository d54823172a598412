"""Differentiation, substitution and coefficient collection."""

from fractions import Fraction

from ..errors import NonPolynomial
from .core import (
    Expr,
    Func,
    JetVar,
    Power,
    Product,
    Rational,
    Sum,
    Symbol,
    ONE,
    ZERO,
    MINUS_ONE,
    HALF,
    PI,
    _split_term,
    add,
    as_expr,
    func,
    mul,
    pow_,
)


def _var_matcher(var):
    if isinstance(var, Expr):
        return lambda n: n == var, (var.name if isinstance(var, (Symbol, JetVar)) else None)
    name = var
    return lambda n: isinstance(n, (Symbol, JetVar)) and n.name == name, name


def differentiate(e, var, depends=None):
    """Partial derivative of ``e`` with respect to ``var``.

    ``var`` is a Symbol, a JetVar, or a name.  Jet variables are independent
    coordinates, except those whose dependent name appears in ``depends``
    (a mapping ``name -> argument names``): ``JetVar(f, J)`` is then a
    function of those arguments and differentiates to ``JetVar(f, J + var)``.
    """
    e = as_expr(e)
    matches, vname = _var_matcher(var)
    depends = depends or {}
    memo = {}

    carriers = frozenset(f for f, args in depends.items() if vname in args)

    def touches(n):
        if vname is None:
            return True
        if vname in n.free_names():
            return True
        return bool(carriers and (n.jet_dependents() & carriers))

    def d(n):
        k = n
        hit = memo.get(k)
        if hit is not None:
            return hit
        out = _d(n)
        memo[k] = out
        return out

    def _d(n):
        if isinstance(n, Rational):
            return ZERO
        if matches(n):
            return ONE
        if isinstance(n, Symbol):
            return ZERO
        if isinstance(n, JetVar):
            args = depends.get(n.dep)
            if args is not None and vname in args:
                return JetVar(n.dep, n.index + (vname,))
            return ZERO
        if not touches(n):
            return ZERO
        if isinstance(n, Sum):
            return add(*[d(t) for t in n.terms])
        if isinstance(n, Product):
            fs = n.factors
            parts = []
            for i, f in enumerate(fs):
                df = d(f)
                if df == ZERO:
                    continue
                # the remaining factors of a canonical product are already canonical
                rest = fs[:i] + fs[i + 1 :]
                parts.append(mul(rest[0] if len(rest) == 1 else Product(rest), df))
            return add(*parts)
        if isinstance(n, Power):
            b, x = n.base, n.exp
            db = d(b)
            dx = d(x)
            out = ZERO
            if db != ZERO:
                out = mul(x, pow_(b, add(x, MINUS_ONE)), db)
            if dx != ZERO:
                out = add(out, mul(n, func("ln", b), dx))
            return out
        if isinstance(n, Func):
            a = n.arg
            da = d(a)
            if da == ZERO:
                return ZERO
            return mul(_outer_derivative(n), da)
        raise TypeError(type(n))

    return d(e)


def _outer_derivative(f):
    a = f.arg
    if f.name == "exp":
        return f
    if f.name == "ln":
        return pow_(a, MINUS_ONE)
    if f.name == "erf":
        # 2/sqrt(pi) * exp(-a^2)
        return mul(Rational(2), pow_(PI, Rational(Fraction(-1, 2))), func("exp", mul(MINUS_ONE, pow_(a, 2))))
    if f.name == "lambertW":
        return mul(f, pow_(a, MINUS_ONE), pow_(add(ONE, f), MINUS_ONE))
    if f.name == "abs":
        # defined away from 0 only
        return mul(a, pow_(f, MINUS_ONE))
    if f.name == "sqrt":
        return mul(HALF, pow_(a, Rational(Fraction(-1, 2))))
    raise ValueError(f.name)


def substitute(e, binding):
    """Simultaneous replacement of Symbols / JetVars, then re-canonicalisation.

    ``binding`` maps names, Symbols or JetVars to expressions (ints and
    Fractions are accepted and converted).
    """
    e = as_expr(e)
    table = {}
    names = set()
    for k, v in binding.items():
        if isinstance(v, float):
            raise TypeError("numeric float bindings belong to evaluate(), not substitute()")
        v = as_expr(v)
        if isinstance(k, str):
            table[("name", k)] = v
            names.add(k)
        else:
            table[("name", k.name)] = v
            names.add(k.name)
    if not names:
        return e
    memo = {}

    def rec(n):
        if not (n.free_names() & names):
            return n
        hit = memo.get(n)
        if hit is not None:
            return hit
        if isinstance(n, (Symbol, JetVar)):
            out = table.get(("name", n.name), n)
        elif isinstance(n, Func):
            out = func(n.name, rec(n.arg))
        elif isinstance(n, Power):
            out = pow_(rec(n.base), rec(n.exp))
        elif isinstance(n, Product):
            out = mul(*[rec(f) for f in n.factors])
        elif isinstance(n, Sum):
            out = add(*[rec(t) for t in n.terms])
        else:
            out = n
        memo[n] = out
        return out

    return rec(e)


def replace_nodes(e, fn):
    """Rebuild ``e`` replacing every leaf ``n`` for which ``fn(n)`` is not None."""
    memo = {}

    def rec(n):
        hit = memo.get(n)
        if hit is not None:
            return hit
        if isinstance(n, (Rational, Symbol, JetVar)):
            r = fn(n)
            out = n if r is None else as_expr(r)
        elif isinstance(n, Func):
            out = func(n.name, rec(n.arg))
        elif isinstance(n, Power):
            out = pow_(rec(n.base), rec(n.exp))
        elif isinstance(n, Product):
            out = mul(*[rec(f) for f in n.factors])
        else:
            out = add(*[rec(t) for t in n.terms])
        memo[n] = out
        return out

    return rec(as_expr(e))


def _names(vars_):
    out = []
    for v in vars_:
        if isinstance(v, str):
            out.append(v)
        else:
            out.append(v.name)
    return out


def expand_collect(e, monomial_vars):
    """Coefficients of ``e`` viewed as a polynomial in ``monomial_vars``.

    Returns ``{degree tuple: coefficient}``; coefficients are free of the
    monomial variables.  Raises NonPolynomial if a variable occurs inside a
    function, a sum base, or with a negative or fractional exponent.
    """
    e = as_expr(e)
    names = _names(monomial_vars)
    pos = {n: i for i, n in enumerate(names)}
    nameset = set(names)
    buckets = {}
    for t in (e.terms if isinstance(e, Sum) else ((e,) if e != ZERO else ())):
        c, fs = _split_term(t)
        deg = [0] * len(names)
        rest = []
        for b, x in fs:
            bn = b.name if isinstance(b, (Symbol, JetVar)) else None
            if bn in pos:
                if not (isinstance(x, Rational) and x.value.denominator == 1 and x.value >= 0):
                    raise NonPolynomial(bn)
                deg[pos[bn]] += x.value.numerator
                continue
            inside = (b.free_names() | x.free_names()) & nameset
            if inside:
                raise NonPolynomial(sorted(inside)[0])
            rest.append(b if x == ONE else Power(b, x))
        coeff = mul(Rational(c), *rest)
        buckets.setdefault(tuple(deg), []).append(coeff)
    out = {}
    for deg, parts in buckets.items():
        s = add(*parts)
        if s != ZERO:
            out[deg] = s
    return out


def collect(e, monomial_vars):
    """Alias of :func:`expand_collect`."""
    return expand_collect(e, monomial_vars)


def linear_coefficients(e, names):
    """Coefficients of ``e`` assumed linear and homogeneous in ``names``."""
    coll = expand_collect(e, names)
    out = {n: ZERO for n in _names(names)}
    for deg, c in coll.items():
        s = sum(deg)
        if s != 1:
            raise NonPolynomial(_names(names)[0])
        out[_names(names)[deg.index(1)]] = c
    return out
