"""Symmetry conditions on the equation manifold and determining equations."""

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, KppSymError, ParseError
from .expr import (
    JetVar,
    as_expr,
    differentiate,
    evaluate,
    expand_collect,
    parse,
    replace_nodes,
    sub,
    substitute,
    terms,
    to_text,
    zero_test,
)
from .expr.core import _split_term
from .jet import JetSpace, VectorField, prolong, total_derivative_multi

EPSILON = "eps"


class PDESystem:
    """Equations ``lhs = rhs`` in solved form over a jet space."""

    def __init__(self, space, equations, parameters=()):
        self.space = space
        eqs = []
        for lhs, rhs in equations:
            lhs = as_expr(lhs)
            if not isinstance(lhs, JetVar) or lhs.dep not in space.dependent:
                raise ValueError(f"left-hand side {to_text(lhs)} is not a derivative of a dependent")
            eqs.append((lhs, as_expr(rhs)))
        deps = [l.dep for l, _ in eqs]
        if len(set(deps)) != len(deps):
            raise ValueError("one equation per dependent variable")
        lhs_names = {l.name for l, _ in eqs}
        for lhs, rhs in eqs:
            if rhs.free_names() & lhs_names:
                raise ValueError(f"right-hand side of {to_text(lhs)} contains a solved derivative")
            for j in space.jet_vars_in(rhs):
                if j.order > space.max_order:
                    raise ValueError(f"{to_text(j)} exceeds max_order {space.max_order}")
        self.equations = tuple(eqs)
        self.parameters = tuple(parameters)

    def with_space(self, space):
        return PDESystem(space, self.equations, self.parameters)

    def residual_forms(self):
        """The expressions Delta_k = lhs - rhs."""
        return [sub(l, r) for l, r in self.equations]

    def to_text(self):
        lines = []
        if self.parameters:
            lines.append("param " + ", ".join(self.parameters) + ";")
        for l, r in self.equations:
            lines.append(f"{to_text(l)} = {to_text(r)}")
        return "\n".join(lines)

    def __repr__(self):
        return "PDESystem(" + "; ".join(f"{to_text(l)} = {to_text(r)}" for l, r in self.equations) + ")"

    def __eq__(self, other):
        return (
            isinstance(other, PDESystem)
            and self.space == other.space
            and self.equations == other.equations
            and self.parameters == other.parameters
        )


def _contains(index, sub_index):
    need = Counter(sub_index)
    have = Counter(index)
    return all(have[k] >= n for k, n in need.items())


def _remove(index, sub_index):
    left = Counter(index)
    left.subtract(Counter(sub_index))
    return tuple(sorted(left.elements()))


def on_manifold(e, system, space=None):
    """Replace every solved derivative (and its prolongations) by the matching rhs.

    Repeats until no solved derivative remains.  ``space`` may widen the jet
    order; with the system's own space D_x(u_t) on a second-order equation
    raises OrderOverflow.
    """
    space = space or system.space
    rules = {l.dep: (l.index, r) for l, r in system.equations}
    cache = {}
    e = as_expr(e)
    for _ in range(64):
        hits = [j for j in space.jet_vars_in(e) if j.dep in rules and _contains(j.index, rules[j.dep][0])]
        if not hits:
            return e
        binding = {}
        for j in hits:
            if j not in cache:
                idx, rhs = rules[j.dep]
                cache[j] = total_derivative_multi(rhs, _remove(j.index, idx), space)
            binding[j] = cache[j]
        e = substitute(e, binding)
    raise KppSymError("manifold substitution did not reach a fixpoint")


def symmetry_residual(X, system, depends=None):
    """pr X(lhs - rhs) restricted to the equation manifold, one entry per equation."""
    wide = system.space.with_order(system.space.max_order + 2)
    P = prolong(X, system.space.max_order, depends)
    out = []
    for delta in system.residual_forms():
        out.append(on_manifold(P.apply(delta), system, wide))
    return out


def unknown_names(space):
    """Names of the undetermined infinitesimals for each base coordinate."""
    if len(space.dependent) == 1:
        names = {"x": "xi", "t": "tau", space.dependent[0]: "phi"}
        if set(space.independent) == {"x", "t"}:
            return names
    names = {}
    for k, i in enumerate(("t", "x"), start=1):
        names[i] = f"xi{k}"
    for k, d in enumerate(space.dependent, start=1):
        names[d] = f"phi{k}"
    return names


def _argument_order(space):
    if len(space.dependent) == 1:
        return ("x", "t") + space.dependent
    return ("t", "x") + space.dependent


@dataclass
class DeterminingSet:
    unknowns: dict
    constraints: list
    coordinates: dict = field(default_factory=dict)

    @property
    def depends(self):
        return dict(self.unknowns)

    def substitute(self, solution):
        """Plug closed forms ``{unknown name: Expr}`` into every constraint."""
        sol = {k: as_expr(v) for k, v in solution.items()}
        memo = {}

        def repl(n):
            if isinstance(n, JetVar) and n.dep in sol:
                if n not in memo:
                    e = sol[n.dep]
                    for v in n.index:
                        e = differentiate(e, v)
                    memo[n] = e
                return memo[n]
            return None

        return [replace_nodes(c, repl) for c in self.constraints]

    def solution_from_field(self, X):
        """Map a VectorField onto the unknown names."""
        return {self.coordinates[k]: X[k] for k in self.coordinates}

    def to_text(self):
        lines = []
        for name, args in self.unknowns.items():
            lines.append(f"unknown {name}({', '.join(args)})")
        for c in self.constraints:
            lines.append(f"{to_text(c)} = 0")
        return "\n".join(lines)


def _normalise(c):
    lead, _ = _split_term(terms(c)[0])
    if lead != 1:
        c = c * as_expr(1 / lead)
    return c


def generate_determining(system):
    """Collect the jet-monomial coefficients of the symbolic invariance condition."""
    space = system.space
    names = unknown_names(space)
    args = _argument_order(space)
    depends = {n: args for n in names.values()}
    X = VectorField(space, {k: JetVar(n, ()) for k, n in names.items()})
    constraints = []
    seen = set()
    for r in symmetry_residual(X, system, depends):
        jets = JetSpace(space.independent, space.dependent, space.max_order + 2).jet_vars_in(r)
        for _, coeff in sorted(expand_collect(r, jets).items()):
            c = _normalise(coeff)
            if c not in seen:
                seen.add(c)
                constraints.append(c)
    return DeterminingSet({n: args for n in names.values()}, constraints, names)


def _draw(rng, name):
    if name == EPSILON:
        return float(rng.uniform(0.01, 1.0))
    mag = rng.uniform(0.1, 2.0)
    return float(mag if rng.random() < 0.5 else -mag)


@dataclass
class NumericReport:
    max_abs_residual: float
    verdict: str
    trials: int
    skipped: int = 0

    def as_dict(self):
        return {
            "max_abs_residual": self.max_abs_residual,
            "verdict": self.verdict,
            "trials": self.trials,
            "skipped": self.skipped,
        }


def verify_residuals_numeric(residuals, trials=100, seed=0):
    """Evaluate residual expressions at random points (see verify_generator_numeric)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    names = sorted(set().union(*[r.free_names() for r in residuals]) - {"pi"})
    parts = [terms(r) for r in residuals]
    worst = 0.0
    ok = True
    skipped = 0
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        for attempt in range(11):
            point = {n: _draw(rng, n) for n in names}
            try:
                vals = [[evaluate(t, point) for t in p] for p in parts]
            except (DomainError, ZeroDivisionError, OverflowError):
                vals = None
            if vals is not None and all(np.isfinite(v) for vs in vals for v in vs):
                break
            if attempt == 10:
                raise DomainError(f"no regular sample point found after 10 resamples: {point}")
            skipped += 1
        for vs in vals:
            total = float(sum(vs))
            magnitude = float(sum(abs(v) for v in vs))
            worst = max(worst, abs(total))
            if not abs(total) < 1e-9 * (1.0 + magnitude):
                ok = False
    return NumericReport(worst, "pass" if ok else "fail", trials, skipped)


def verify_generator_numeric(X, system, trials=100, seed=0):
    """Randomised check that X leaves the system invariant.

    Every free name (base coordinates, jet variables, parameters) is drawn from
    [-2, -0.1] U [0.1, 2], except ``eps`` from [0.01, 1].  The verdict is
    "pass" iff at every point |residual| < 1e-9 * (1 + sum of |term values|).
    Trial k uses its own generator spawned from ``seed``.
    """
    return verify_residuals_numeric(symmetry_residual(X, system), trials, seed)


@dataclass
class Verification:
    symbolic: list
    numeric: NumericReport

    @property
    def passed(self):
        return all(s != "nonzero" for s in self.symbolic) and self.numeric.verdict == "pass"


def verify_generator(X, system, trials=100, seed=0):
    residuals = symmetry_residual(X, system)
    symbolic = [zero_test(r) for r in residuals]
    return Verification(symbolic, verify_residuals_numeric(residuals, trials, seed))


_PARAM = re.compile(r"^\s*param\s+(.*?);?\s*$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_system(text, independent=("x", "t"), max_order=2):
    """Read the equation file format.

    One equation ``u_t = eps*u_xx + a*u*(1-u)`` per line; ``param eps, a;``
    declares constants; ``#`` starts a comment.  Dependents are taken from the
    left-hand sides in order of appearance.
    """
    params = []
    raw = []
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.split("#", 1)[0]
        stripped = body.strip()
        if stripped:
            m = _PARAM.match(body)
            if m:
                for p in m.group(1).split(","):
                    p = p.strip()
                    if not _IDENT.match(p):
                        raise ParseError(f"bad parameter name {p!r}", offset)
                    params.append(p)
            else:
                if body.count("=") != 1:
                    raise ParseError("expected exactly one '=' in equation", offset)
                left, right = body.split("=")
                try:
                    lhs = parse(left)
                except ParseError as exc:
                    raise ParseError("bad left-hand side", offset + exc.offset) from None
                try:
                    rhs = parse(right)
                except ParseError as exc:
                    raise ParseError("bad right-hand side", offset + len(left.encode()) + 1 + exc.offset) from None
                if not isinstance(lhs, JetVar):
                    raise ParseError("left-hand side must be a derivative such as u_t", offset)
                raw.append((lhs, rhs))
        offset += len(line.encode())
    if not raw:
        raise ParseError("no equations found", 0)
    deps = tuple(l.dep for l, _ in raw)
    order = max([max_order] + [j.order for _, r in raw for j in JetSpace(independent, deps, 8).jet_vars_in(r)])
    space = JetSpace(independent, deps, order)
    free = set().union(*[r.free_names() for _, r in raw]) - set(space.base) - {"pi"}
    free -= {j.name for _, r in raw for j in space.jet_vars_in(r)}
    undeclared = sorted(free - set(params))
    if undeclared:
        raise ParseError(f"undeclared parameter {undeclared[0]!r}", 0)
    return PDESystem(space, raw, params)


def constraint_status(constraints):
    return [zero_test(c) for c in constraints]


__all__ = [
    "DeterminingSet",
    "NumericReport",
    "PDESystem",
    "Verification",
    "constraint_status",
    "generate_determining",
    "on_manifold",
    "parse_system",
    "symmetry_residual",
    "unknown_names",
    "verify_generator",
    "verify_generator_numeric",
    "verify_residuals_numeric",
]
