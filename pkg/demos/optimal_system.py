"""The three-dimensional approximate symmetry algebra and its optimal system.

Prints the commutator and adjoint tables, then reduces a few elements
a1*X1 + a2*X2 + a3*X3 to canonical representatives and replays the witness.
"""

from fractions import Fraction

from kppsym import canonicalize, classify_orbit, kpp3
from kppsym.expr import Symbol
from kppsym.liealg import adjoint_table, commutator_table, format_element, render_table, replay, row_action

alg = kpp3()
for name, X in zip(alg.names, alg.basis):
    print(f"{name} = {X.to_text()}")
print()
print(render_table("[Xi,Xj]", commutator_table(alg), alg.names))
print()
print(render_table("Ad(exp(s Xi)) Xj", adjoint_table(alg, Symbol("s")), alg.names, lead_diagonal=True))

# Adjoint matrices acting on coefficient columns.
print()
for a in [(1, 0, 0), (0, 0, 1), (2, 4, 6), (Fraction(-3, 2), 5, 1)]:
    f = canonicalize(a)
    back = replay(alg, a, f)
    label = "(" + ", ".join(str(v) for v in a) + ")"
    print(f"{label:16s} case {f.case:3s} {format_element(f.canonical, alg.names):12s} replay ok: {back == f.canonical}")

# The same reduction using the adjoint action itself (rows of the matrices
# are images).  Here a3 is invariant, so the cases partition differently.
print()
for a in [(2, 4, 6), (0, 1, 0)]:
    f = classify_orbit(a)
    back = replay(alg, a, f, row_action)
    label = "(" + ", ".join(str(v) for v in a) + ")"
    print(f"{label:16s} orbit case {f.case:3s} {format_element(f.canonical, alg.names):12s} replay ok: {back == f.canonical}")
