"""Immutable expression trees kept in a ring-normal canonical form.

A canonical expression is a sum of terms; each term is an exact rational
coefficient times a product of factors ``base**exponent``.  Products of sums
are always expanded, positive integer powers of sums are multiplied out, and
negative or fractional powers of sums survive as opaque factors whose base
is normalised so that its leading term has coefficient one.

The node classes can also be instantiated directly to build raw
(non-canonical) trees; :func:`canon` rebuilds any tree through the smart
constructors.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational as _RationalNumber

FUNCTIONS = ("exp", "ln", "erf", "lambertW", "sqrt", "abs")

# Positive integer powers of sums above this are left unexpanded.
MAX_EXPAND_POWER = 32

_F1 = Fraction(1)

# monic term products, cleared wholesale when full
_PRODUCT_MEMO = {}
_PRODUCT_MEMO_SIZE = 1 << 16

# interned small integer coefficients
_SMALL = {}


class Expr:
    __slots__ = ("key", "_hash", "_free", "_deps")

    def __init__(self, key, h):
        self.key = key
        self._hash = h
        self._free = None
        self._deps = None

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Fraction)):
                return self.key == (0, Fraction(other))
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(other, neg(self))

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), MINUS_ONE))

    def __rtruediv__(self, other):
        return mul(other, pow_(self, MINUS_ONE))

    def __pow__(self, other):
        return pow_(self, other)

    def __rpow__(self, other):
        return pow_(other, self)

    def __neg__(self):
        return neg(self)

    def __pos__(self):
        return self

    def __repr__(self):
        from .printing import to_text

        return f"<{type(self).__name__} {to_text(self)}>"

    def __str__(self):
        from .printing import to_text

        return to_text(self)

    @property
    def children(self):
        return ()

    def free_names(self):
        """Names of every Symbol and JetVar occurring in the tree."""
        if self._free is None:
            out = set()
            for c in self.children:
                out |= c.free_names()
            self._free = frozenset(out)
        return self._free

    def jet_dependents(self):
        """Dependent names of every JetVar occurring in the tree."""
        if self._deps is None:
            out = set()
            for c in self.children:
                out |= c.jet_dependents()
            self._deps = frozenset(out)
        return self._deps

    def is_number(self):
        return False


class Rational(Expr):
    __slots__ = ("value", "coef")

    def __init__(self, value):
        if type(value) is not Fraction:
            value = Fraction(value)
        self.value = value
        # term arithmetic runs on plain ints whenever the value is integral
        self.coef = value.numerator if value.denominator == 1 else value
        # Fraction.__hash__ is slow; Expr hashes only need to agree among Exprs
        super().__init__((0, value), hash((0, value.numerator, value.denominator)))

    def free_names(self):
        return frozenset()

    def is_number(self):
        return True


class Symbol(Expr):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        key = (1, name)
        super().__init__(key, hash(key))

    def free_names(self):
        return frozenset((self.name,))


class JetVar(Expr):
    """Derivative coordinate ``dep`` differentiated along ``index`` (sorted)."""

    __slots__ = ("dep", "index")

    def __init__(self, dep, index=()):
        self.dep = dep
        self.index = tuple(sorted(index))
        key = (2, dep, self.index)
        super().__init__(key, hash(key))

    @property
    def order(self):
        return len(self.index)

    @property
    def name(self):
        if not self.index:
            return self.dep
        return self.dep + "_" + "".join(self.index)

    def free_names(self):
        return frozenset((self.name,))

    def jet_dependents(self):
        return frozenset((self.dep,))


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name, arg):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name!r}")
        self.name = name
        self.arg = arg
        super().__init__((3, name, arg.key), hash((3, name, arg._hash)))

    @property
    def children(self):
        return (self.arg,)


class Power(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        self.base = base
        self.exp = exp
        super().__init__((4, base.key, exp.key), hash((4, base._hash, exp._hash)))

    @property
    def children(self):
        return (self.base, self.exp)


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = items = tuple(factors)
        super().__init__((5, tuple([f.key for f in items])), hash((5, tuple([f._hash for f in items]))))

    @property
    def children(self):
        return self.factors


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = items = tuple(terms)
        super().__init__((6, tuple([t.key for t in items])), hash((6, tuple([t._hash for t in items]))))

    @property
    def children(self):
        return self.terms


ZERO = Rational(0)
ONE = Rational(1)
MINUS_ONE = Rational(-1)
HALF = Rational(Fraction(1, 2))
PI = Symbol("pi")


def as_expr(x):
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not expressions")
    if isinstance(x, (Integral, Fraction, _RationalNumber)):
        return Rational(Fraction(x))
    if isinstance(x, str):
        from .parse import parse

        return parse(x)
    if isinstance(x, float):
        raise TypeError("floats are not allowed inside symbolic expressions")
    raise TypeError(f"cannot convert {type(x).__name__} to an expression")


def sym(names):
    """``sym("x t")`` -> tuple of Symbols; a single name returns one Symbol."""
    parts = names.replace(",", " ").split()
    out = tuple(Symbol(p) for p in parts)
    return out[0] if len(out) == 1 else out


# ---------------------------------------------------------------------------
# term machinery
#
# A term is (coeff: Fraction, factors: tuple[(base, exp), ...]) with factors
# sorted by base key.  A term dict maps a monomial key to such a term.


def _factor_pair(f):
    if type(f) is Power:
        return (f.base, f.exp)
    return (f, ONE)


def _split_term(e):
    te = type(e)
    if te is Rational:
        return e.value, ()
    if te is Product:
        fs = e.factors
        if type(fs[0]) is Rational:
            return fs[0].value, tuple(_factor_pair(f) for f in fs[1:])
        return _F1, tuple(_factor_pair(f) for f in fs)
    return _F1, (_factor_pair(e),)


def _monokey(factors):
    # pairs of Exprs hash through their cached hashes; nested key tuples would not
    return factors if type(factors) is tuple else tuple(factors)


def _terms_of(e):
    if type(e) is Sum:
        items = e.terms
    else:
        items = (e,)
    out = {}
    for t in items:
        tt = type(t)
        if tt is Rational:
            c, fs = t.coef, ()
        elif tt is Product:
            f0 = t.factors[0]
            if type(f0) is Rational:
                c, fs = f0.coef, tuple([_factor_pair(f) for f in t.factors[1:]])
            else:
                c, fs = 1, tuple([_factor_pair(f) for f in t.factors])
        else:
            c, fs = 1, (_factor_pair(t),)
        out[fs] = (c, fs)
    return out


def _build_factor(b, x):
    if x is ONE or x == ONE:
        return b
    return Power(b, x)


def _coefficient(c):
    if type(c) is int and -64 <= c <= 64:
        r = _SMALL.get(c)
        if r is None:
            r = _SMALL[c] = Rational(c)
        return r
    return Rational(c)


def _build_term(c, fs):
    if not fs:
        return _coefficient(c)
    nodes = [_build_factor(b, x) for b, x in fs]
    if c == 1:
        if len(nodes) == 1:
            return nodes[0]
        return Product(nodes)
    return Product([_coefficient(c)] + nodes)


def _sort_key(mk):
    return [(b.key, x.key) for b, x in mk]


def _from_terms(d):
    children = []
    for mk in sorted(d, key=_sort_key) if len(d) > 1 else d:
        c, fs = d[mk]
        if c != 0:
            children.append(_build_term(c, fs))
    if not children:
        return ZERO
    if len(children) == 1:
        return children[0]
    return Sum(children)


def _accumulate(acc, c, fs):
    mk = _monokey(fs)
    prev = acc.get(mk)
    if prev is None:
        acc[mk] = (c, fs)
    else:
        acc[mk] = (prev[0] + c, fs)


def _add_exps(x, y):
    if isinstance(x, Rational) and isinstance(y, Rational):
        return Rational(x.coef + y.coef)
    return add(x, y)


def _mul_exps(x, y):
    if isinstance(x, Rational) and isinstance(y, Rational):
        return Rational(x.coef * y.coef)
    return mul(x, y)


def _int_value(x):
    """Integer value of a Rational expression, else None."""
    if type(x) is Rational and type(x.coef) is int:
        return x.coef
    return None


def _iroot(n, k):
    """Exact integer k-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


def _radical(n, f):
    """Normal form of the positive integer ``n`` raised to ``f``.

    Returns (coefficient Fraction, list of (Rational base, Rational exp)
    factors with exponents in (0, 1)).
    """
    p, q = f.numerator, f.denominator
    k, r = divmod(p, q)
    coeff = Fraction(n) ** k
    if r == 0 or n == 1:
        return coeff, []
    root = _iroot(n, q)
    if root is not None:
        return coeff * Fraction(root) ** r, []
    return coeff, [(Rational(n), Rational(Fraction(r, q)))]


def _leading_coeff(s):
    c, _ = _split_term(s.terms[0])
    return c


def _contains_exp(b):
    return isinstance(b, Func) and b.name == "exp"


def _canon_factors(coeff, merged):
    """Normalise merged factors; returns a term dict (may hold several terms)."""
    simple = []
    extras = []
    exp_arg = None
    lambert = []

    for b, x in merged:
        tb = type(b)
        if tb is Symbol or tb is JetVar:
            if not (type(x) is Rational and x.coef == 0):
                simple.append((b, x))
            continue
        if x == ZERO:
            continue
        if tb is Func and b.name == "exp":
            a = _mul_exps(b.arg, x) if x != ONE else b.arg
            exp_arg = a if exp_arg is None else add(exp_arg, a)
            continue
        if isinstance(b, Func) and b.name == "lambertW" and _int_value(x) is not None and _int_value(x) > 0:
            lambert.append([b, _int_value(x)])
            continue
        for b, x in _split_fractional(b, x):
            kind = _classify(b, x)
            if kind is None:
                simple.append((b, x))
            else:
                extras.append(kind)

    if lambert and exp_arg is not None:
        arg_terms = _terms_of(exp_arg)
        for item in lambert:
            w, m = item
            mk = _monokey(((w, ONE),))
            hit = arg_terms.get(mk)
            if hit is None or hit[0].denominator != 1 or hit[0] <= 0:
                continue
            n = min(m, hit[0].numerator)
            item[1] = m - n
            exp_arg = add(exp_arg, mul(Rational(-n), w))
            arg_terms = _terms_of(exp_arg)
            extras.append(pow_(w.arg, Rational(n)))
    for w, m in lambert:
        if m:
            simple.append((w, Rational(m)))

    if exp_arg is not None:
        e = func("exp", exp_arg)
        if isinstance(e, Func):
            simple.append((e, ONE))
        elif e != ONE:
            extras.append(e)

    simple.sort(key=lambda p: (p[0].key, p[1].key))
    result = {_monokey(simple): (coeff, tuple(simple))}
    for ex in extras:
        if isinstance(ex, Fraction):
            result = {k: (c * ex, fs) for k, (c, fs) in result.items()}
        else:
            result = _mul_dicts(result, _terms_of(ex))
    return result


def _split_fractional(b, x):
    """Sum**(p/q) becomes Sum**floor * Sum**frac, two separate factors.

    Keeping the fractional part in (0, 1) gives every power of one radical
    the same monomial, so common denominators expose cancellations.
    """
    if isinstance(b, Sum) and isinstance(x, Rational) and x.value.denominator != 1:
        k = x.value.numerator // x.value.denominator
        if k != 0:
            return ((b, Rational(k)), (b, Rational(x.value - k)))
    return ((b, x),)


def _classify(b, x):
    """None if ``b**x`` is an irreducible factor, otherwise its expansion.

    The expansion is returned either as a Fraction (pure coefficient) or as
    an Expr that must be multiplied into the term.
    """
    xi = _int_value(x)
    if isinstance(b, Rational):
        if not isinstance(x, Rational):
            return None
        if b.value == 0:
            if x.value > 0:
                return Fraction(0)
            raise ZeroDivisionError("zero raised to a non-positive power")
        if xi is not None:
            return b.value**xi
        if b.value < 0:
            return None
        num, den = b.value.numerator, b.value.denominator
        if den == 1 and 0 < x.value < 1:
            c, rad = _radical(num, x.value)
            if c == 1 and len(rad) == 1 and rad[0][0] == b and rad[0][1] == x:
                return None
        c1, r1 = _radical(num, x.value)
        c2, r2 = _radical(den, -x.value)
        # den**(-f) = den**(-ceil) * den**(frac) handled by _radical via floor
        fs = tuple(sorted(r1 + r2, key=lambda p: p[0].key))
        coeff = c1 * c2
        if not fs:
            return coeff
        merged = {}
        for rb, rx in fs:
            if rb in merged:
                merged[rb] = (rb, _add_exps(merged[rb][1], rx))
            else:
                merged[rb] = (rb, rx)
        return _from_terms({_monokey(tuple(merged.values())): (coeff, tuple(merged.values()))})
    if isinstance(b, (Symbol, JetVar)):
        return None
    if isinstance(b, Func):
        if b.name == "abs" and xi is not None and xi % 2 == 0:
            return pow_(b.arg, x)
        return None
    if isinstance(b, Sum):
        if xi is not None:
            if xi > 0:
                if xi == 1:
                    return b
                if xi <= MAX_EXPAND_POWER:
                    out = b
                    for _ in range(xi - 1):
                        out = mul(out, b)
                    return out
                return None
            lc = _leading_coeff(b)
            if lc != 1:
                scaled = mul(Rational(1 / lc), b)
                return mul(Rational(lc**xi), Power(scaled, x))
            return None
        return None
    if isinstance(b, Product):
        if xi is not None:
            return mul(*[pow_(f, x) for f in b.factors])
        if isinstance(x, Rational):
            k = x.value.numerator // x.value.denominator
            if k != 0:
                return mul(pow_(b, Rational(k)), Power(b, Rational(x.value - k)))
        return None
    if isinstance(b, Power):
        if xi is not None:
            return pow_(b.base, _mul_exps(b.exp, x))
        return None
    return None


def _mul_term(t1, t2):
    c = t1[0] * t2[0]
    if c == 0:
        return {}
    fa, fb = t1[1], t2[1]
    if not fa or not fb:
        fs = fa or fb
        return {_monokey(fs): (c, fs)}
    # the normal form is linear in the coefficient, so memoise the monic product
    unit = _PRODUCT_MEMO.get((fa, fb))
    if unit is None:
        merged = {}
        order = []
        for b, x in fa + fb:
            if b in merged:
                merged[b] = (b, _add_exps(merged[b][1], x))
            else:
                merged[b] = (b, x)
                order.append(b)
        unit = _canon_factors(1, [merged[k] for k in order])
        if len(_PRODUCT_MEMO) >= _PRODUCT_MEMO_SIZE:
            _PRODUCT_MEMO.clear()
        _PRODUCT_MEMO[(fa, fb)] = unit
    if c == 1:
        return unit
    return {k: (c * uc, fs) for k, (uc, fs) in unit.items()}


def _mul_dicts(a, b):
    acc = {}
    for t1 in a.values():
        for t2 in b.values():
            for c, fs in _mul_term(t1, t2).values():
                _accumulate(acc, c, fs)
    return acc


# ---------------------------------------------------------------------------
# smart constructors


def add(*args):
    acc = {}
    for a in args:
        a = as_expr(a)
        if type(a) is Rational and a.coef == 0:
            continue
        for c, fs in _terms_of(a).values():
            _accumulate(acc, c, fs)
    return _from_terms(acc)


def mul(*args):
    acc = None
    for a in args:
        a = as_expr(a)
        if isinstance(a, Rational):
            if a.coef == 0:
                return ZERO
            if a.coef == 1:
                continue
        d = _terms_of(a)
        acc = d if acc is None else _mul_dicts(acc, d)
    if acc is None:
        return ONE
    return _from_terms(acc)


def neg(e):
    return mul(MINUS_ONE, e)


def sub(a, b):
    return add(a, neg(as_expr(b)))


def div(a, b):
    return mul(a, pow_(as_expr(b), MINUS_ONE))


def pow_(b, x):
    b = as_expr(b)
    x = as_expr(x)
    if x == ZERO:
        # 0^0 = 1, the power-series convention
        return ONE
    if x == ONE:
        return b
    if isinstance(b, Power):
        inner = b.exp
        if _int_value(x) is not None or (isinstance(inner, Rational) and inner.value.denominator != 1):
            b, x = b.base, _mul_exps(inner, x)
    terms = _canon_factors(_F1, [(b, x)])
    return _from_terms(terms)


def func(name, arg):
    arg = as_expr(arg)
    if name == "sqrt":
        return pow_(arg, HALF)
    if name == "exp":
        if arg == ZERO:
            return ONE
        if isinstance(arg, Func) and arg.name == "ln":
            return arg.arg
        return Func("exp", arg)
    if name == "ln":
        if arg == ONE:
            return ZERO
        if isinstance(arg, Func) and arg.name == "exp":
            return arg.arg
        if isinstance(arg, Rational) and arg.value <= 0:
            from ..errors import DomainError

            raise DomainError(f"ln of non-positive constant {arg.value}")
        return Func("ln", arg)
    if name == "erf":
        if arg == ZERO:
            return ZERO
        return Func("erf", arg)
    if name == "lambertW":
        if arg == ZERO:
            return ZERO
        return Func("lambertW", arg)
    if name == "abs":
        if isinstance(arg, Rational):
            return Rational(abs(arg.value))
        if isinstance(arg, Func) and arg.name == "abs":
            return arg
        if isinstance(arg, Func) and arg.name == "exp":
            return arg
        c, _ = _split_term(arg.terms[0] if isinstance(arg, Sum) else arg)
        if c < 0:
            arg = neg(arg)
        return Func("abs", arg)
    raise ValueError(f"unknown function {name!r}")


def exp(a):
    return func("exp", a)


def ln(a):
    return func("ln", a)


def erf(a):
    return func("erf", a)


def lambertW(a):
    return func("lambertW", a)


def sqrt(a):
    return func("sqrt", a)


def abs_(a):
    return func("abs", a)


def canon(e):
    """Rebuild ``e`` bottom-up through the smart constructors."""
    memo = {}

    def rec(n):
        k = id(n)
        if k in memo:
            return memo[k][1]
        if isinstance(n, (Rational, Symbol, JetVar)):
            out = n
        elif isinstance(n, Func):
            out = func(n.name, rec(n.arg))
        elif isinstance(n, Power):
            out = pow_(rec(n.base), rec(n.exp))
        elif isinstance(n, Product):
            out = mul(*[rec(f) for f in n.factors])
        elif isinstance(n, Sum):
            out = add(*[rec(t) for t in n.terms])
        else:
            raise TypeError(type(n))
        memo[k] = (n, out)
        return out

    return rec(e)


def terms(e):
    """The additive terms of ``e`` (a one-element tuple unless ``e`` is a Sum)."""
    if isinstance(e, Sum):
        return e.terms
    if e == ZERO:
        return ()
    return (e,)


def coefficient_and_monomial(e):
    """Split a single term into (Fraction coefficient, monomial Expr)."""
    c, fs = _split_term(e)
    return c, _build_term(_F1, fs)
