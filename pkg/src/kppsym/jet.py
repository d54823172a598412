"""Jet-space bookkeeping: total derivatives and prolongation of vector fields.

Order-zero coordinates of the dependent variables are plain Symbols (``u``);
derivatives are JetVars (``u_x``, ``u_tx``).  Unknown functions of the base
coordinates, such as undetermined infinitesimals, can be threaded through via
``depends`` (see :func:`kppsym.expr.differentiate`).
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement

from .errors import NonPolynomial, OrderOverflow, ParseError
from .expr import (
    JetVar,
    Sum,
    Symbol,
    ZERO,
    add,
    as_expr,
    coefficient_and_monomial,
    differentiate,
    linear_coefficients,
    mul,
    neg,
    parse,
    to_text,
)


@dataclass(frozen=True)
class JetSpace:
    independent: tuple = ("x", "t")
    dependent: tuple = ("u",)
    max_order: int = 2

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        names = self.independent + self.dependent
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be distinct: {names}")
        if self.max_order < 1:
            raise ValueError("max_order must be positive")

    @property
    def base(self):
        return self.independent + self.dependent

    def with_order(self, n):
        return JetSpace(self.independent, self.dependent, n)

    def multi_indices(self, order):
        return list(combinations_with_replacement(sorted(self.independent), order))

    def jet_vars(self, min_order=1, max_order=None):
        top = self.max_order if max_order is None else max_order
        out = []
        for dep in self.dependent:
            for k in range(min_order, top + 1):
                out.extend(JetVar(dep, J) for J in self.multi_indices(k))
        return out

    def coordinate(self, dep, index=()):
        if not index:
            return Symbol(dep)
        return JetVar(dep, index)

    def jet_vars_in(self, e):
        """JetVars of this space's dependents that occur in ``e``."""
        return sorted(_collect_jetvars(e, set(self.dependent)), key=lambda j: j.key)


def _collect_jetvars(e, deps):
    out = set()
    if not (e.jet_dependents() & deps):
        return out
    stack = [e]
    seen = set()
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if isinstance(n, JetVar):
            if n.dep in deps:
                out.add(n)
            continue
        for c in n.children:
            if c.jet_dependents() & deps:
                stack.append(c)
    return out


def total_derivative(e, xi, space, depends=None):
    """D_xi e = de/dxi + sum over dependents and multi-indices u^a_{J,xi} de/du^a_J."""
    e = as_expr(e)
    parts = [differentiate(e, xi, depends)]
    for dep in space.dependent:
        # unknown functions carried by ``depends`` hide their dependence on dep
        d = differentiate(e, Symbol(dep), depends)
        if d != ZERO:
            parts.append(mul(JetVar(dep, (xi,)), d))
    for j in space.jet_vars_in(e):
        d = differentiate(e, j, depends)
        if d == ZERO:
            continue
        if j.order + 1 > space.max_order:
            raise OrderOverflow(f"D_{xi}({to_text(j)}) needs order {j.order + 1} > {space.max_order}")
        parts.append(mul(JetVar(j.dep, j.index + (xi,)), d))
    return add(*parts)


def total_derivative_multi(e, index, space, depends=None):
    for xi in index:
        e = total_derivative(e, xi, space, depends)
    return e


class VectorField:
    """Infinitesimal generator sum_k coeffs[k] * d/dz_k over a jet space's base."""

    def __init__(self, space, coeffs):
        self.space = space
        clean = {}
        for k, v in coeffs.items():
            if k not in space.base:
                raise ValueError(f"{k!r} is not a coordinate of {space}")
            v = as_expr(v)
            if v != ZERO:
                clean[k] = v
        self.coeffs = clean

    def __getitem__(self, name):
        return self.coeffs.get(name, ZERO)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.space == other.space and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.space, tuple(sorted((k, v.key) for k, v in self.coeffs.items()))))

    def __add__(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        return VectorField(self.space, {k: add(self[k], other[k]) for k in keys})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, a):
        return VectorField(self.space, {k: mul(a, v) for k, v in self.coeffs.items()})

    def __rmul__(self, a):
        return self.scale(a)

    def is_zero(self):
        return not self.coeffs

    def apply(self, f, depends=None):
        """X(f) = sum_k coeffs[k] * df/dz_k (base coordinates only)."""
        f = as_expr(f)
        return add(*[mul(c, differentiate(f, Symbol(k), depends)) for k, c in self.coeffs.items()])

    def __repr__(self):
        return "VectorField(" + self.to_text() + ")"

    def to_text(self):
        if not self.coeffs:
            return "0"
        out = ""
        for k in self.space.base:
            if k not in self.coeffs:
                continue
            c = self.coeffs[k]
            negative = not isinstance(c, Sum) and coefficient_and_monomial(c)[0] < 0
            if negative:
                c = neg(c)
            body = f"d{k}" if c == 1 else (f"({to_text(c)})*d{k}" if isinstance(c, Sum) else f"{to_text(c)}*d{k}")
            if not out:
                out = ("-" if negative else "") + body
            else:
                out += (" - " if negative else " + ") + body
        return out


class ProlongedField:
    def __init__(self, base, jet_coeffs, depends=None):
        self.base = base
        self.jet_coeffs = jet_coeffs
        self.depends = depends

    def __getitem__(self, key):
        if isinstance(key, str):
            if key in self.base.space.base:
                return self.base[key]
            dep, _, idx = key.partition("_")
            key = JetVar(dep, tuple(idx))
        return self.jet_coeffs[key]

    def apply(self, f):
        """pr X(f), with f a function on the jet space."""
        f = as_expr(f)
        parts = [self.base.apply(f, self.depends)]
        names = f.free_names()
        for j, c in self.jet_coeffs.items():
            if j.name in names and c != ZERO:
                parts.append(mul(c, differentiate(f, j, self.depends)))
        return add(*parts)


def characteristic(X, dep, depends=None):
    """Q^a = phi^a - sum_i xi^i u^a_i."""
    return add(X[dep], *[neg(mul(X[i], JetVar(dep, (i,)))) for i in X.space.independent])


def prolong(X, order=None, depends=None):
    """Prolongation through the characteristic: phi^J = D_J Q + sum_i xi^i u_{J,i}."""
    space = X.space
    order = space.max_order if order is None else order
    wide = space.with_order(order + 1)
    coeffs = {}
    for dep in space.dependent:
        Q = characteristic(X, dep, depends)
        cache = {(): Q}
        for k in range(1, order + 1):
            for J in space.multi_indices(k):
                DQ = total_derivative(cache[J[:-1]], J[-1], wide, depends)
                cache[J] = DQ
                extra = [mul(X[i], JetVar(dep, J + (i,))) for i in space.independent]
                coeffs[JetVar(dep, J)] = add(DQ, *extra)
    return ProlongedField(X, coeffs, depends)


def prolong2(X, depends=None):
    return prolong(X, 2, depends)


def prolong_recursive(X, order=None, depends=None):
    """Recursive prolongation phi^{J,i} = D_i phi^J - sum_k (D_i xi^k) u_{J,k}."""
    space = X.space
    order = space.max_order if order is None else order
    wide = space.with_order(order + 1)
    dxi = {}
    for i in space.independent:
        for k in space.independent:
            dxi[(i, k)] = total_derivative(X[k], i, wide, depends)
    coeffs = {}
    for dep in space.dependent:
        prev = {(): X[dep]}
        for n in range(1, order + 1):
            cur = {}
            for J in space.multi_indices(n):
                base, i = J[:-1], J[-1]
                phi = total_derivative(prev[base], i, wide, depends)
                corr = [neg(mul(dxi[(i, k)], space.coordinate(dep, base + (k,)))) for k in space.independent]
                cur[J] = add(phi, *corr)
                coeffs[JetVar(dep, J)] = cur[J]
            prev = cur
    return ProlongedField(X, coeffs, depends)


def parse_vector_field(text, space):
    """Read ``"4*x*t*dx + 4*t^2*dt - u*du"``: ``d<name>`` marks each basis field."""
    e = parse(text)
    markers = ["d" + k for k in space.base]
    clash = e.free_names() & set(space.base) & set(markers)
    if clash:
        raise ParseError(f"ambiguous marker {sorted(clash)[0]}", 0)
    try:
        coeffs = linear_coefficients(e, markers)
    except NonPolynomial:
        raise ParseError("vector field must be linear in the markers " + ", ".join(markers), 0) from None
    return VectorField(space, {k: coeffs["d" + k] for k in space.base})
