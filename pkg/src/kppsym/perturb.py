"""Perturbation splitting u = v + eps*w and the KPP equation catalog."""

from dataclasses import dataclass, field

from .detsys import EPSILON, PDESystem
from .errors import NonPolynomial
from .expr import (
    JetVar,
    Symbol,
    ZERO,
    add,
    differentiate,
    expand_collect,
    mul,
    parse,
    sub,
    substitute,
    to_text,
)
from .jet import JetSpace

SCALAR_SPACE = JetSpace(("x", "t"), ("u",), 2)
SPLIT_SPACE = JetSpace(("x", "t"), ("v", "w"), 2)

REACTIONS = {
    "heat": "0",
    "fisher": "a*u*(1-u)",
    "zeldovich": "u^2*(1-u)",
    "nws": "u*(1-u^2)",
}

_NOTES = {
    "fisher": [
        "order-0 equation is v_t = a*v*(1-v); the variant with an extra factor w "
        "is inconsistent with the reduced ODE f' = a*f*(1-f) used for its own invariant solutions",
    ],
    "zeldovich": [],
    "nws": [],
    "heat": [],
}


@dataclass
class PerturbedEquation:
    """u_t = eps*u_xx + R(u), with eps a small positive parameter."""

    reaction: object
    name: str = "custom"
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.reaction, str):
            self.reaction = parse(self.reaction)
        extra = self.reaction.free_names() & {EPSILON, "v", "w"}
        if extra:
            raise ValueError(f"reaction term may not contain {sorted(extra)}")

    @property
    def parameters(self):
        return tuple([EPSILON] + sorted(self.reaction.free_names() - {"u", "x", "t", "pi"}))

    @property
    def base(self):
        rhs = add(mul(Symbol(EPSILON), JetVar("u", ("x", "x"))), self.reaction)
        return PDESystem(SCALAR_SPACE, [(JetVar("u", ("t",)), rhs)], self.parameters)

    def defect(self):
        """u_t - eps*u_xx - R(u) as an expression on the jet space."""
        return sub(JetVar("u", ("t",)), self.base.equations[0][1])


def builtin_equation(name):
    if name not in REACTIONS:
        raise KeyError(f"unknown equation {name!r}; choose from {sorted(REACTIONS)}")
    return PerturbedEquation(parse(REACTIONS[name]), name, list(_NOTES[name]))


def expand_perturbation(e):
    """Substitute u -> v + eps*w in every jet coordinate of u."""
    eps = Symbol(EPSILON)
    binding = {"u": add(Symbol("v"), mul(eps, Symbol("w")))}
    for j in SCALAR_SPACE.with_order(4).jet_vars():
        binding[j] = add(JetVar("v", j.index), mul(eps, JetVar("w", j.index)))
    return substitute(e, binding)


def epsilon_orders(p):
    """{k: coefficient of eps^k} of the defect at u = v + eps*w."""
    try:
        coll = expand_collect(expand_perturbation(p.defect()), [EPSILON])
    except NonPolynomial:
        raise NonPolynomial(to_text(p.reaction)) from None
    return {deg[0]: c for deg, c in coll.items()}


@dataclass
class SplitSystem:
    system: PDESystem
    notes: list

    def __iter__(self):
        return iter(self.system.equations)


def _solve_for(coeff, lhs):
    # coeff must read lhs - rhs with unit coefficient on lhs
    d = differentiate(coeff, lhs)
    if d != 1:
        raise ValueError(f"order equation is not in solved form for {to_text(lhs)}")
    return sub(lhs, coeff)


def split_order1(p, order=1):
    """Order-0 and order-1 equations for v and w."""
    if order != 1:
        raise NotImplementedError("only first-order truncation is supported")
    orders = epsilon_orders(p)
    v_t, w_t = JetVar("v", ("t",)), JetVar("w", ("t",))
    rhs0 = _solve_for(orders.get(0, ZERO), v_t)
    rhs1 = _solve_for(orders.get(1, ZERO), w_t)
    params = tuple(n for n in p.parameters if n != EPSILON)
    sys = PDESystem(SPLIT_SPACE, [(v_t, rhs0), (w_t, rhs1)], params)
    return SplitSystem(sys, list(p.notes))


def builtin_split(name):
    return split_order1(builtin_equation(name)).system


def builtin_system(name):
    """``heat``/``fisher``/``zeldovich``/``nws`` or their ``-split`` systems."""
    if name.endswith("-split"):
        return builtin_split(name[: -len("-split")])
    return builtin_equation(name).base


BUILTIN_SYSTEMS = tuple(REACTIONS) + tuple(n + "-split" for n in REACTIONS if n != "heat")


def resubstitution_remainder(p):
    """Defect at u = v + eps*w minus (order-0 residual) minus eps*(order-1 residual)."""
    split = split_order1(p).system
    (l0, r0), (l1, r1) = split.equations
    whole = expand_perturbation(p.defect())
    return sub(whole, add(sub(l0, r0), mul(Symbol(EPSILON), sub(l1, r1))))


def first_order_reaction(reaction):
    """R'(v)*w, the order-1 reaction term predicted for any polynomial R."""
    return mul(substitute(differentiate(reaction, "u"), {"u": Symbol("v")}), Symbol("w"))
