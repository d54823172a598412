"""Approximate symmetries of perturbed reaction-diffusion equations.

Each equation u_t = eps*u_xx + R(u) is expanded as u = v + eps*w and split
into an order-0 and an order-1 system.  Exact symmetries of that coupled
system are the approximate symmetries of the original equation.
"""

from kppsym import builtin_equation, parse_vector_field, split_order1, verify_generator
from kppsym.expr import to_text

for name in ("fisher", "zeldovich", "nws"):
    split = split_order1(builtin_equation(name))
    print(f"\n{name}")
    for lhs, rhs in split.system.equations:
        print(f"  {to_text(lhs)} = {to_text(rhs)}")
    for note in split.notes:
        print(f"  note: {note}")

    # time and space translations, and a scaling that also rescales w
    for g in ("dt", "dx", "x*dx - 2*w*dw", "x*dx"):
        v = verify_generator(parse_vector_field(g, split.system.space), split.system, trials=100, seed=0)
        verdict = "symmetry" if v.passed else f"not a symmetry (residual {v.numeric.max_abs_residual:.2e})"
        print(f"  {g:16s} {verdict}")
