"""Closed-form solutions, PDE residuals on grids, and one-parameter group actions."""

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .detsys import EPSILON
from .errors import DomainError, NonPolynomial, NotAffine
from .expr import (
    ZERO,
    JetVar,
    Rational,
    Symbol,
    add,
    as_expr,
    differentiate,
    evaluate,
    exp,
    expand_collect,
    mul,
    neg,
    parse,
    sub,
    substitute,
    to_text,
)
from .perturb import builtin_equation, builtin_split, expand_perturbation
from .special import erf, lambert_w

PAPER_FORM = "paper-form"
CORRECTED_FORM = "corrected-form"
TOLERANCE = 1e-9
MAX_SKIPPED = 0.2


@dataclass(frozen=True)
class Exclusion:
    """Drop grid points with |coord - center| < radius."""

    coord: str
    center: float
    radius: float


@dataclass(frozen=True)
class Grid:
    x_range: tuple = (-2.0, 2.0)
    t_range: tuple = (0.1, 2.0)
    nx: int = 50
    nt: int = 50
    excluded: tuple = ()

    def __post_init__(self):
        if self.nx < 2 or self.nt < 2:
            raise ValueError("grids need at least two points per axis")
        for lo, hi in (self.x_range, self.t_range):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bad range [{lo}, {hi}]")

    def points(self):
        """Flattened (x, t) arrays with excluded points removed."""
        x = np.linspace(self.x_range[0], self.x_range[1], self.nx)
        t = np.linspace(self.t_range[0], self.t_range[1], self.nt)
        X, T = np.meshgrid(x, t, indexing="ij")
        X, T = X.ravel(), T.ravel()
        keep = np.ones(X.shape, dtype=bool)
        for ex in self.excluded:
            c = X if ex.coord == "x" else T
            keep &= np.abs(c - ex.center) >= ex.radius
        return X[keep], T[keep]

    def as_dict(self):
        return {
            "x_range": list(self.x_range),
            "t_range": list(self.t_range),
            "nx": self.nx,
            "nt": self.nt,
            "excluded": [[e.coord, e.center, e.radius] for e in self.excluded],
        }


@dataclass
class SolutionEntry:
    id: str
    equation: str
    order0: object
    order1: object = None
    params: dict = field(default_factory=dict)
    provenance: str = CORRECTED_FORM
    notes: str = ""
    grid: Grid = field(default_factory=Grid)
    epsilon: float = 0.1

    def __post_init__(self):
        self.order0 = parse(self.order0) if isinstance(self.order0, str) else as_expr(self.order0)
        if self.order1 is not None:
            self.order1 = parse(self.order1) if isinstance(self.order1, str) else as_expr(self.order1)
        allowed = {"x", "t", "pi"} | set(self.params)
        if self.is_exact:
            allowed.add(EPSILON)
        for part in (self.order0, self.order1):
            if part is not None and not part.free_names() <= allowed:
                raise ValueError(f"{self.id}: unexpected symbols {sorted(part.free_names() - allowed)}")

    @property
    def is_exact(self):
        return self.order1 is None

    def binding(self, epsilon=None):
        b = {k: float(v) for k, v in self.params.items()}
        if epsilon is not None:
            b[EPSILON] = float(epsilon)
        return b

    def combined(self):
        """u = v + eps*w (or the exact solution)."""
        if self.is_exact:
            return self.order0
        return add(self.order0, mul(Symbol(EPSILON), self.order1))

    def as_dict(self):
        return {
            "id": self.id,
            "equation": self.equation,
            "order0": to_text(self.order0),
            "order1": None if self.order1 is None else to_text(self.order1),
            "params": {k: str(v) for k, v in sorted(self.params.items())},
            "provenance": self.provenance,
            "notes": self.notes,
        }


def _jet_binding(fields):
    """Values of every jet coordinate up to order 2 for the given solution fields."""
    out = {}
    for dep, e in fields.items():
        out[dep] = e
        for J in (("x",), ("t",), ("x", "x"), ("t", "x"), ("t", "t")):
            d = e
            for var in J:
                d = differentiate(d, var)
            out[JetVar(dep, J)] = d
    return out


def residual_expressions(entry):
    """Symbolic PDE residuals: one for exact entries, one per order for split entries."""
    if entry.is_exact:
        p = builtin_equation(entry.equation)
        return [("full", substitute(p.defect(), _jet_binding({"u": entry.order0})))]
    system = builtin_split(entry.equation)
    binding = _jet_binding({"v": entry.order0, "w": entry.order1})
    out = []
    for (lhs, rhs), label in zip(system.equations, ("order0", "order1")):
        out.append((label, substitute(sub(lhs, rhs), binding)))
    return out


def full_defect_expression(entry):
    """u_t - eps*u_xx - R(u) at u = v + eps*w, with eps left symbolic."""
    p = builtin_equation(entry.equation)
    return substitute(p.defect(), _jet_binding({"u": entry.combined()}))


def _evaluate_on(e, grid, binding):
    X, T = grid.points()
    b = dict(binding)
    b["x"] = X
    b["t"] = T
    vals = evaluate(e, b, strict=False)
    return np.broadcast_to(np.asarray(vals, dtype=float), X.shape)


@dataclass
class ResidualReport:
    sup_norm: float
    l2_norm: float
    n_points: int
    epsilon: float
    components: dict = field(default_factory=dict)
    skipped: int = 0

    def verdict(self, tol=TOLERANCE):
        return "pass" if self.sup_norm < tol else "fail"

    def as_dict(self):
        return {
            "sup_norm": self.sup_norm,
            "l2_norm": self.l2_norm,
            "n_points": self.n_points,
            "epsilon": self.epsilon,
            "skipped": self.skipped,
            "components": {k: dict(v) for k, v in sorted(self.components.items())},
        }


def _norms(values):
    if values.size == 0:
        return 0.0, 0.0
    a = np.abs(values)
    return float(a.max()), float(np.sqrt(np.mean(a * a)))


def evaluate_residuals(named, grid, binding, epsilon):
    """Evaluate named residual expressions on a grid, skipping undefined points."""
    cols = [_evaluate_on(e, grid, binding) for _, e in named]
    ok = np.ones(cols[0].shape, dtype=bool)
    for c in cols:
        ok &= np.isfinite(c)
    total = ok.size
    skipped = int(total - ok.sum())
    if total == 0 or skipped > MAX_SKIPPED * total:
        raise DomainError(f"{skipped} of {total} grid points are outside the domain of the solution")
    components = {}
    for (name, _), c in zip(named, cols):
        sup, l2 = _norms(c[ok])
        components[name] = {"sup_norm": sup, "l2_norm": l2}
    allv = np.concatenate([c[ok] for c in cols])
    sup, _ = _norms(allv)
    l2 = float(np.sqrt(np.mean(allv * allv))) if allv.size else 0.0
    return ResidualReport(sup, l2, int(ok.sum()), float(epsilon), components, skipped)


def residual(entry, grid=None, epsilon=None):
    """Sup and RMS norms of the entry's PDE residual(s) on ``grid``."""
    grid = grid or entry.grid
    epsilon = entry.epsilon if epsilon is None else epsilon
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    return evaluate_residuals(residual_expressions(entry), grid, entry.binding(epsilon), epsilon)


def epsilon_coefficient(entry, k=2):
    """Symbolic coefficient of eps^k in the full defect once the split equations hold."""
    p = builtin_equation(entry.equation)
    coll = expand_collect(expand_perturbation(p.defect()), [EPSILON])
    c = coll.get((k,), ZERO)
    return substitute(c, _jet_binding({"v": entry.order0, "w": entry.order1}))


@dataclass
class OrderScaling:
    eps_list: list
    sup_norms: list
    slopes: list
    fitted_exponent: object
    status: str
    oracle_sup: float = None

    def as_dict(self):
        return {
            "eps_list": list(self.eps_list),
            "sup_norms": list(self.sup_norms),
            "slopes": list(self.slopes),
            "fitted_exponent": self.fitted_exponent,
            "status": self.status,
            "oracle_eps2_sup": self.oracle_sup,
        }


def order_scaling(entry, grid=None, eps_list=(1e-1, 1e-2, 1e-3)):
    """Log-log slope of the full-equation defect at u = v + eps*w against eps."""
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("need at least three epsilon values")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilon values must be decreasing")
    grid = grid or entry.grid
    defect = full_defect_expression(entry)
    sups = []
    for e in eps_list:
        rep = evaluate_residuals([("full", defect)], grid, entry.binding(e), e)
        sups.append(rep.sup_norm)
    if entry.is_exact or all(s < TOLERANCE for s in sups):
        return OrderScaling(eps_list, sups, [], None, "exact")
    le, ls = np.log(eps_list), np.log(sups)
    slopes = [float((ls[i + 1] - ls[i]) / (le[i + 1] - le[i])) for i in range(len(sups) - 1)]
    fitted = float(np.polyfit(le, ls, 1)[0])
    c2 = epsilon_coefficient(entry, 2)
    oracle = evaluate_residuals([("eps2", c2)], grid, entry.binding(), 0.0).sup_norm
    return OrderScaling(eps_list, sups, slopes, fitted, "scaling", oracle)


# ---------------------------------------------------------------- flows


def _check_affine(X):
    names = list(X.space.base)
    for k, c in X.coeffs.items():
        try:
            coll = expand_collect(c, names)
        except NonPolynomial:
            raise NotAffine(f"coefficient of d{k} is not polynomial: {to_text(c)}") from None
        if any(sum(deg) > 1 for deg in coll):
            raise NotAffine(f"coefficient of d{k} is not affine: {to_text(c)}")


@dataclass
class FlowMap:
    """Closed-form image of each base coordinate under exp(s X)."""

    space: object
    images: dict
    parameter: object

    def at(self, s):
        s = _exact(s)
        return {k: substitute(v, {self.parameter: s}) for k, v in self.images.items()}

    def __call__(self, point, s):
        b = {k: float(v) for k, v in point.items()}
        b[self.parameter.name] = float(s)
        return {k: evaluate(v, b) for k, v in self.images.items()}


def _exact(s):
    if isinstance(s, float):
        return Rational(Fraction(repr(s)))
    return as_expr(s)


def flow(X, s=None, max_terms=50):
    """Sum the Lie series z + s X(z) + s^2/2 X(X(z)) + ... per coordinate.

    Works for affine fields whose iterates terminate or become geometric
    (X^(m+1) z = lam X^m z), which covers translations and scalings.
    """
    _check_affine(X)
    s = Symbol("s") if s is None else _exact(s)
    param = s if isinstance(s, Symbol) else Symbol("s")
    images = {}
    for k in X.space.base:
        cur = Symbol(k)
        total = ZERO
        m = 0
        fact = 1
        while True:
            if m >= max_terms:
                raise NotAffine(f"flow series for {k} did not close")
            if cur == ZERO:
                break
            nxt = X.apply(cur)
            lam = None
            if nxt != ZERO:
                r = mul(nxt, cur**-1)
                if not (r.free_names() & set(X.space.base)):
                    lam = r
            if lam is not None:
                head = add(*[mul(Rational(Fraction(1, _fact(j))), mul(lam, param) ** j) for j in range(m)])
                tail = mul(lam ** (-m), sub(exp(mul(lam, param)), head))
                total = add(total, mul(tail, cur))
                break
            total = add(total, mul(Rational(Fraction(1, fact)), param**m, cur))
            m += 1
            fact *= m
            cur = nxt
        images[k] = total
    fm = FlowMap(X.space, images, param)
    if param is not s:
        return FlowMap(X.space, fm.at(s), param)
    return fm


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def kpp3_field(i):
    from .liealg import kpp3_basis

    return kpp3_basis()[i - 1]


def _map_range(image, coord, lo, hi):
    f = lambda v: evaluate(image, {coord: v})
    a, b = f(lo), f(hi)
    return (min(a, b), max(a, b))


def transform_solution(entry, i, s, field_=None):
    """Image of a split solution under the one-parameter group of X_i.

    The new fields are v~(x, t) = G(s)_v at the preimage point, which for the
    approximate-symmetry algebra reproduces f(t - s, x), f(t, x - s) and
    f(t, e^-s x) + eps e^-2s g(t, e^-s x) for X1, X2, X3.

    An exact entry is treated as v = u, w = 0; the result is again exact, and
    its residual tells whether the flow is a symmetry of the full equation.
    """
    X = field_ if field_ is not None else kpp3_field(i)
    s_exact = _exact(s)
    fwd = flow(X, s_exact).images
    back = flow(X, neg(s_exact)).images
    indep = X.space.independent
    deps = X.space.dependent
    for k in indep:
        if back[k].free_names() & set(deps):
            raise NotAffine("flow mixes dependent variables into the base point")
    pre = {k: back[k] for k in indep}
    fields = {"v": entry.order0, "w": ZERO if entry.is_exact else entry.order1}
    moved = {d: substitute(fields[d], pre) for d in deps}
    binding = dict(pre)
    binding.update(moved)
    new0 = substitute(fwd["v"], binding)
    new1 = substitute(fwd["w"], binding)
    if entry.is_exact:
        if new1 != ZERO:
            raise ValueError(f"G{i} moves w off zero; the image of {entry.id} is not an exact solution")
        new1 = None
    g = entry.grid
    ranges = {}
    for k, r in (("x", g.x_range), ("t", g.t_range)):
        img = fwd[k]
        if img.free_names() <= {k, "pi"}:
            ranges[k] = _map_range(img, k, *r)
        else:
            ranges[k] = r
    excl = []
    for ex in g.excluded:
        img = fwd[ex.coord]
        if img.free_names() <= {ex.coord, "pi"}:
            c = evaluate(img, {ex.coord: ex.center})
            lo, hi = _map_range(img, ex.coord, ex.center - ex.radius, ex.center + ex.radius)
            excl.append(Exclusion(ex.coord, c, max(c - lo, hi - c)))
        else:
            excl.append(ex)
    grid = replace(g, x_range=ranges["x"], t_range=ranges["t"], excluded=tuple(excl))
    return SolutionEntry(
        id=f"{entry.id}@G{i}({s})",
        equation=entry.equation,
        order0=new0,
        order1=new1,
        params=dict(entry.params),
        provenance=entry.provenance,
        notes=(entry.notes + " " if entry.notes else "") + f"transformed by G{i}(s={s})",
        grid=grid,
        epsilon=entry.epsilon,
    )


# ---------------------------------------------------------------- catalog

_W_REF = "lambertW(-exp(-t-1)/c1)"
_W_FIXED = "lambertW(exp(-t-1)/c1)"

_X3_GRID = Grid((0.5, 3.0), (0.1, 2.0))


def _entries():
    return [
        SolutionEntry(
            "fick_wave",
            "heat",
            "c1 + c2*exp(-c*(x - c*t)/eps)",
            params={"c": 1, "c1": 0, "c2": 1},
            provenance=PAPER_FORM,
            notes="travelling wave invariant under c*X1 + X2 of the heat equation",
            grid=Grid((-2.0, 2.0), (0.1, 2.0)),
        ),
        SolutionEntry(
            "fick_erf",
            "heat",
            "c1 + c2*erf(abs(x)/(2*sqrt(eps*t)))",
            params={"c1": 0, "c2": 1},
            provenance=PAPER_FORM,
            notes="similarity solution in x^2/t; |x| makes it one-sided, so grids stay off x = 0",
            grid=Grid((0.2, 3.0), (0.1, 2.0)),
        ),
        SolutionEntry(
            "fisher_x3",
            "fisher",
            "1/(1 + c1*exp(-a*t))",
            "c2*exp(-a*t)/(x^2*(1 + c1*exp(-a*t))^2)",
            params={"a": 1, "c1": 1, "c2": 1},
            provenance=PAPER_FORM,
            notes="invariant under x*dx - 2*w*dw; w = g(t)/x^2",
            grid=_X3_GRID,
        ),
        SolutionEntry(
            "fisher_wave",
            "fisher",
            "1/(c1*exp(a*(x - c*t)/c) + 1)",
            "exp(a*(x - c*t)/c)/(c1*exp(a*(x - c*t)/c) + 1)"
            "*(c1/c^3*(x - c*t) - 2*a*c1/c^2*ln(c1*exp(a*(x - c*t)/c) + 1) + c2)",
            params={"a": 1, "c": 1, "c1": 1, "c2": 1},
            provenance=PAPER_FORM,
            notes="travelling wave in y = x - c*t in its reference form; the order-1 part mixes constants "
            "inconsistently and is kept verbatim",
            grid=Grid((-2.0, 2.0), (0.1, 2.0)),
        ),
        SolutionEntry(
            "az_wave",
            "fisher",
            "(1 + C*exp(sqrt(a/(6*eps))*x - 5*a*t/6))^(-2)",
            params={"a": 1, "C": 1},
            provenance=CORRECTED_FORM,
            notes="u = (1 + C e^(k x - w t))^-2 with k = sqrt(a/(6 eps)), w = 5a/6; the reference variant "
            "places eps in the amplitude and uses k = sqrt(6)",
            grid=Grid((-2.0, 2.0), (0.1, 2.0)),
        ),
        SolutionEntry(
            "az_wave_reference",
            "fisher",
            "(1 + eps/sqrt(6)*exp(sqrt(6)*x - 5*t/6))^(-2)",
            params={"a": 1},
            provenance=PAPER_FORM,
            notes="reference form with a = 1; not a solution for eps != 1/36",
            grid=Grid((-2.0, 2.0), (0.1, 2.0)),
        ),
        SolutionEntry(
            "zeldovich_x3",
            "zeldovich",
            f"1/{_W_REF}",
            f"c2*exp(-2*{_W_REF})*{_W_REF}/(x^2*({_W_REF} + 1))",
            params={"c1": 1, "c2": 1},
            provenance=PAPER_FORM,
            notes="reference Lambert-W form; v = 1/W(-e^(-t-1)/c1) does not solve v_t = v^2(1-v)",
            grid=_X3_GRID,
        ),
        SolutionEntry(
            "zeldovich_x3_corrected",
            "zeldovich",
            f"1/(1 + {_W_FIXED})",
            f"c2*{_W_FIXED}/(x^2*(1 + {_W_FIXED})^3)",
            params={"c1": 1, "c2": 1},
            provenance=CORRECTED_FORM,
            notes="v from separating v_t = v^2(1-v); g solves g' = g(2v - 3v^2) and w = g/x^2",
            grid=_X3_GRID,
        ),
        SolutionEntry(
            "nws_x3",
            "nws",
            "sgn/sqrt(1 + c1*exp(-2*t))",
            "c2*exp(-2*t)/(1 + c1*exp(-2*t))^(3/2)",
            params={"sgn": 1, "c1": 1, "c2": 1},
            provenance=PAPER_FORM,
            notes="sgn = +1 or -1; the order-1 part is given without the 1/x^2 factor and is "
            "an x-independent solution of the order-1 equation",
            grid=_X3_GRID,
        ),
    ]


CATALOG = {e.id: e for e in _entries()}


def get_entry(entry_id, **params):
    if entry_id not in CATALOG:
        raise KeyError(f"unknown entry {entry_id!r}; choose from {sorted(CATALOG)}")
    e = CATALOG[entry_id]
    if params:
        unknown = set(params) - set(e.params)
        if unknown:
            raise KeyError(f"{entry_id} has no parameter {sorted(unknown)[0]!r}")
        e = replace(e, params={**e.params, **params})
    return e


__all__ = [
    "CATALOG",
    "CORRECTED_FORM",
    "Exclusion",
    "FlowMap",
    "Grid",
    "OrderScaling",
    "PAPER_FORM",
    "ResidualReport",
    "SolutionEntry",
    "epsilon_coefficient",
    "erf",
    "flow",
    "full_defect_expression",
    "kpp3_field",
    "get_entry",
    "lambert_w",
    "order_scaling",
    "residual",
    "residual_expressions",
    "transform_solution",
]
