"""Minimal computer-algebra kernel.

Expressions are immutable and always canonical when built through the
constructors exported here (``add``, ``mul``, ``pow_``, ``func``, operator
overloads, or :func:`parse`).
"""

from .core import (
    FUNCTIONS,
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
    PI,
    abs_,
    add,
    as_expr,
    canon,
    coefficient_and_monomial,
    div,
    erf,
    exp,
    func,
    lambertW,
    ln,
    mul,
    neg,
    pow_,
    sqrt,
    sub,
    sym,
    terms,
)
from .calculus import differentiate, expand_collect, linear_coefficients, replace_nodes, substitute
from .evaluate import eval_numeric, evaluate
from .parse import parse
from .printing import to_text
from .zero import clear_denominators, is_zero, zero_test

diff = differentiate

__all__ = [name for name in dir() if not name.startswith("_")]
