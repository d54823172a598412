"""Point symmetries of the slow-diffusion heat equation u_t = eps*u_xx.

Walks through the determining equations, the general solution of that
system, and a symbolic plus numeric check of each generator.
"""

from kppsym import builtin_system, generate_determining, parse, parse_vector_field, symmetry_residual, verify_generator
from kppsym.expr import to_text

heat = builtin_system("heat")

# The invariance condition, split by jet monomials, gives a linear system for
# the unknown infinitesimals xi(x, t, u), tau(x, t, u) and phi(x, t, u).
D = generate_determining(heat)
print(f"{len(D.constraints)} determining equations")
print(D.to_text())

# Its general solution is a six-parameter family plus an arbitrary solution
# F of the equation itself (the superposition symmetry).
family = {
    "xi": parse("c1*t*x + c2*x - 2*eps*c4*t + c6"),
    "tau": parse("c1*t^2 + 2*c2*t + c3"),
    "phi": parse("(c4*x + c5 - c1*t/2 - c1*x^2/(4*eps))*u"),
}
print("family solves every equation:", all(c == 0 for c in D.substitute(family)))

# Reading off one constant at a time gives a basis; each one should leave the
# equation manifold invariant.
generators = {
    "X1": "dx",
    "X2": "dt",
    "X3": "x*dx + 2*t*dt",
    "X4": "-2*eps*t*dx + x*u*du",
    "X5": "u*du",
    "X6": "4*x*t*dx + 4*t^2*dt - (2*t + x^2/eps)*u*du",
    "X_F": "exp(x + eps*t)*du",
}
for name, text in generators.items():
    X = parse_vector_field(text, heat.space)
    (res,) = symmetry_residual(X, heat)
    v = verify_generator(X, heat, trials=100, seed=0)
    print(f"{name:4s} residual {to_text(res):>3s}  numeric max {v.numeric.max_abs_residual:.1e}  {v.numeric.verdict}")
