"""Approximate Lie symmetries of perturbed KPP reaction-diffusion equations."""

from .errors import (
    DomainError,
    KppSymError,
    NonPolynomial,
    NotAffine,
    NotClosed,
    OrderOverflow,
    ParseError,
    SeriesNotClosing,
    UnboundSymbol,
    ZeroElement,
)
from .expr import differentiate, eval_numeric, expand_collect, parse, substitute, to_text
from .jet import JetSpace, VectorField, parse_vector_field, prolong, prolong2, total_derivative
from .detsys import (
    PDESystem,
    generate_determining,
    on_manifold,
    parse_system,
    symmetry_residual,
    verify_generator,
    verify_generator_numeric,
)
from .perturb import PerturbedEquation, builtin_equation, builtin_system, split_order1
from .liealg import LieAlgebra, canonicalize, classify_orbit, commutator, composed_map, kpp3, structure_constants
from .special import erf, lambert_w
from .solutions import CATALOG, Grid, SolutionEntry, flow, get_entry, order_scaling, residual, transform_solution

__version__ = "0.1.0"
