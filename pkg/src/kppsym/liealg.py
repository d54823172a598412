"""Finite-dimensional Lie algebras of vector fields.

Elements are coefficient vectors over an ordered basis.  The adjoint action
Ad(exp(s X_i)) Y is summed from its Lie series; ``adjoint_matrix`` lists the
images of the basis vectors as rows.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import NotClosed, SeriesNotClosing, ZeroElement
from .expr import ONE, ZERO, Rational, Symbol, add, as_expr, div, exp, mul, neg, sub, to_text
from .expr.core import Sum, _split_term, terms
from .jet import VectorField, parse_vector_field

MAX_SERIES_TERMS = 50


def commutator(X, Y):
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    if X.space != Y.space:
        raise ValueError("vector fields live on different spaces")
    keys = set(X.coeffs) | set(Y.coeffs)
    return VectorField(X.space, {k: sub(X.apply(Y[k]), Y.apply(X[k])) for k in keys})


def _features(X, params):
    """Split every coefficient into (coordinate, monomial) -> parameter-only factor."""
    out = {}
    for k, c in X.coeffs.items():
        for t in terms(c):
            q, fs = _split_term(t)
            mono = []
            scal = [Rational(q)]
            for b, x in fs:
                if (b.free_names() | x.free_names()) <= params:
                    scal.append(b if x == ONE else as_expr(b) ** x)
                else:
                    mono.append((b.key, x.key))
            key = (k, tuple(mono))
            out[key] = add(out.get(key, ZERO), mul(*scal))
    return {k: v for k, v in out.items() if v != ZERO}


def _solve(columns, target):
    """Exact solve of sum_j c_j columns[j] = target over feature dicts."""
    rows = sorted(set().union(target, *columns), key=repr)
    n = len(columns)
    A = [[col.get(r, ZERO) for col in columns] + [target.get(r, ZERO)] for r in rows]
    piv_cols = []
    row = 0
    for col in range(n):
        p = next((r for r in range(row, len(A)) if A[r][col] != ZERO), None)
        if p is None:
            continue
        A[row], A[p] = A[p], A[row]
        lead = A[row][col]
        A[row] = [div(v, lead) for v in A[row]]
        for r in range(len(A)):
            if r != row and A[r][col] != ZERO:
                f = A[r][col]
                A[r] = [sub(a, mul(f, b)) for a, b in zip(A[r], A[row])]
        piv_cols.append(col)
        row += 1
    if len(piv_cols) < n:
        raise ValueError("basis vector fields are linearly dependent")
    for r in range(row, len(A)):
        if A[r][n] != ZERO:
            return None
    return [A[i][n] for i in range(n)]


class LieAlgebra:
    def __init__(self, basis, structure, names=None):
        self.basis = list(basis)
        self.structure = structure
        self.names = names or [f"X{i + 1}" for i in range(len(self.basis))]

    @property
    def dim(self):
        return len(self.basis)

    def c(self, i, j, k):
        """Structure constant with 1-based indices."""
        return self.structure[i - 1][j - 1][k - 1]

    def bracket(self, a, b):
        """Bracket of two elements given by coefficient vectors."""
        a = [as_expr(x) for x in a]
        b = [as_expr(x) for x in b]
        n = self.dim
        out = [ZERO] * n
        for i in range(n):
            if a[i] == ZERO:
                continue
            for j in range(n):
                if b[j] == ZERO:
                    continue
                w = mul(a[i], b[j])
                for k in range(n):
                    c = self.structure[i][j][k]
                    if c != ZERO:
                        out[k] = add(out[k], mul(w, c))
        return out

    def element(self, coeffs):
        """The vector field sum_i coeffs[i] X_i."""
        total = VectorField(self.basis[0].space, {})
        for a, X in zip(coeffs, self.basis):
            total = total + X.scale(as_expr(a))
        return total

    def is_antisymmetric(self):
        n = self.dim
        return all(
            add(self.structure[i][j][k], self.structure[j][i][k]) == ZERO
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )

    def jacobi_holds(self):
        n = self.dim
        e = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    s = [
                        add(x, y, z)
                        for x, y, z in zip(
                            self.bracket(e[i], self.bracket(e[j], e[k])),
                            self.bracket(e[j], self.bracket(e[k], e[i])),
                            self.bracket(e[k], self.bracket(e[i], e[j])),
                        )
                    ]
                    if any(v != ZERO for v in s):
                        return False
        return True

    def ad_matrix(self, i):
        """C[j][k] with [X_i, X_j] = sum_k C[j][k] X_k (1-based i)."""
        return [list(row) for row in self.structure[i - 1]]

    def adjoint(self, i, s, y):
        """Ad(exp(s X_i)) applied to the element y: Lie series y - s[X_i, y] + ..."""
        return adjoint_series(self.ad_matrix(i), as_expr(s), [as_expr(v) for v in y])

    def adjoint_matrix(self, i, s):
        """Rows are the images Ad(exp(s X_i)) X_j."""
        n = self.dim
        rows = []
        for j in range(n):
            e = [ONE if k == j else ZERO for k in range(n)]
            rows.append(self.adjoint(i, s, e))
        return rows

    def act(self, i, s, a):
        """Adjoint action on an element a = sum a_j X_j, i.e. the row vector a*M."""
        return row_action(self.adjoint_matrix(i, s), a)

    def format_element(self, vec, lead=None):
        return format_element(vec, self.names, lead)


def structure_constants(basis, names=None):
    """Compute c[i][j][k] exactly; raises NotClosed if a bracket leaves the span."""
    basis = list(basis)
    if not basis:
        raise ValueError("empty basis")
    space_names = set(basis[0].space.base)
    params = set()
    for X in basis:
        for c in X.coeffs.values():
            params |= c.free_names()
    params -= space_names
    cols = [_features(X, params) for X in basis]
    n = len(basis)
    zero = [ZERO] * n
    c = [[list(zero) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            C = commutator(basis[i], basis[j])
            sol = _solve(cols, _features(C, params))
            if sol is None:
                raise NotClosed(f"[X{i + 1}, X{j + 1}] = {C.to_text()} is not in the span")
            for k in range(n):
                c[i][j][k] = sol[k]
                c[j][i][k] = neg(sol[k])
    return LieAlgebra(basis, c, names)


def _vec_mul(y, C):
    n = len(C)
    out = [ZERO] * len(C[0])
    for j in range(n):
        if y[j] == ZERO:
            continue
        for k, c in enumerate(C[j]):
            if c != ZERO:
                out[k] = add(out[k], mul(y[j], c))
    return out


def _ratio(a, b):
    """lam with a = lam*b componentwise and lam free of s, or None."""
    lam = None
    for x, y in zip(a, b):
        if y == ZERO:
            if x != ZERO:
                return None
            continue
        r = div(x, y)
        if lam is None:
            lam = r
        elif r != lam:
            return None
    return lam


def adjoint_series(C, s, y):
    """Sum_m (-s)^m/m! y C^m in closed form.

    Terminates if some y C^m vanishes; if y C^(m+1) = lam * y C^m the tail sums
    to an exponential.  Anything else raises SeriesNotClosing.
    """
    total = [ZERO] * len(y)
    cur = list(y)
    for m in range(MAX_SERIES_TERMS):
        if all(v == ZERO for v in cur):
            return total
        nxt = _vec_mul(cur, C)
        lam = _ratio(nxt, cur)
        if lam is not None and lam != ZERO:
            # tail: sum_{k>=m} (-s)^k lam^(k-m)/k! * cur
            head = add(*[mul(Rational(Fraction(1, factorial(k))), (neg(mul(lam, s))) ** k) for k in range(m)])
            tail = mul(div(ONE, lam**m), sub(exp(neg(mul(lam, s))), head))
            return [add(t, mul(tail, v)) for t, v in zip(total, cur)]
        coef = mul(Rational(Fraction(1, factorial(m))), neg(s) ** m)
        total = [add(t, mul(coef, v)) for t, v in zip(total, cur)]
        cur = nxt
    raise SeriesNotClosing(f"adjoint series did not close within {MAX_SERIES_TERMS} terms")


def row_action(M, a):
    n = len(M)
    return [add(*[mul(as_expr(a[j]), M[j][k]) for j in range(n)]) for k in range(len(M[0]))]


def column_action(M, a):
    """M*a, the convention in which the composed map reads (a1, a2 e^s2, a3 - s1 a2)."""
    return [add(*[mul(M[k][j], as_expr(a[j])) for j in range(len(a))]) for k in range(len(M))]


def composed_map(alg, a, s=None):
    """F3 o F2 o F1 applied to a as column vector; ``s`` maps basis index to parameter.

    By default F1 uses s0, F2 uses s1 and F3 uses s2.
    """
    if s is None:
        s = {1: Symbol("s0"), 2: Symbol("s1"), 3: Symbol("s2")}
    out = [as_expr(v) for v in a]
    for i in sorted(s):
        out = column_action(alg.adjoint_matrix(i, s[i]), out)
    return out


def _fraction_vector(a):
    out = []
    for v in a:
        if isinstance(v, float):
            v = Fraction(v)
        out.append(Fraction(v))
    return out


@dataclass
class CanonicalForm:
    case: str
    canonical: list
    witness: list
    scale: Fraction
    parameter: Fraction = None

    def as_dict(self, names=("X1", "X2", "X3")):
        return {
            "case": self.case,
            "canonical": format_element([Rational(v) for v in self.canonical], list(names)),
            "coeffs": [str(v) for v in self.canonical],
            "witness": [{"generator": f"X{i}", "s": str(s)} for i, s in self.witness],
            "scale": str(self.scale),
            "parameter": None if self.parameter is None else str(self.parameter),
        }


def canonicalize(a):
    """Reduce a1 X1 + a2 X2 + a3 X3 of the three-dimensional approximate algebra.

    case ii  (alpha X1 + X2): a2 != 0; Ad with s1 = a3/a2 on X2, then scale 1/a2
    case iii (beta X1 + X3):  a2 == 0, a3 != 0; scale 1/a3
    case i   (X1):            a2 == a3 == 0; scale 1/a1
    Witness matrices act on the coefficient column (see column_action).
    """
    a1, a2, a3 = _fraction_vector(a)
    if a1 == a2 == a3 == 0:
        raise ZeroElement("the zero element generates no subalgebra")
    if a2 != 0:
        alpha = a1 / a2
        return CanonicalForm("ii", [alpha, Fraction(1), Fraction(0)], [(2, a3 / a2)], 1 / a2, alpha)
    if a3 != 0:
        beta = a1 / a3
        return CanonicalForm("iii", [beta, Fraction(0), Fraction(1)], [], 1 / a3, beta)
    return CanonicalForm("i", [Fraction(1), Fraction(0), Fraction(0)], [], 1 / a1)


def replay(alg, a, form, action=column_action):
    """Apply the witness adjoint matrices then the scale; exact rationals in and out."""
    out = [as_expr(v) for v in a]
    for i, s in form.witness:
        out = action(alg.adjoint_matrix(i, Rational(s)), out)
    return [mul(Rational(form.scale), v) for v in out]


def classify_orbit(a):
    """Orbit representative under the adjoint action itself (row convention).

    Ad(exp(s X2)) sends (a1, a2, a3) to (a1, a2 - s a3, a3) and Ad(exp(s X3))
    multiplies a2 by e^s, so a3 is invariant:
    a3 != 0 gives beta X1 + X3, a3 == 0 != a2 gives alpha X1 + X2, else X1.
    """
    a1, a2, a3 = _fraction_vector(a)
    if a1 == a2 == a3 == 0:
        raise ZeroElement("the zero element generates no subalgebra")
    if a3 != 0:
        beta = a1 / a3
        return CanonicalForm("iii", [beta, Fraction(0), Fraction(1)], [(2, a2 / a3)], 1 / a3, beta)
    if a2 != 0:
        alpha = a1 / a2
        return CanonicalForm("ii", [alpha, Fraction(1), Fraction(0)], [], 1 / a2, alpha)
    return CanonicalForm("i", [Fraction(1), Fraction(0), Fraction(0)], [], 1 / a1)


def _coef_text(c):
    t = to_text(c)
    if isinstance(c, Sum):
        return "(" + t + ")"
    return t


def format_element(vec, names, lead=None):
    order = list(range(len(vec)))
    if lead is not None:
        order.remove(lead)
        order.insert(0, lead)
    parts = []
    for k in order:
        c = as_expr(vec[k])
        if c == ZERO:
            continue
        if c == ONE:
            body, neg_ = names[k], False
        elif c == -1:
            body, neg_ = names[k], True
        else:
            q, _ = _split_term(c) if not isinstance(c, Sum) else (Fraction(1), ())
            neg_ = q < 0
            body = _coef_text(neg(c) if neg_ else c) + "*" + names[k]
        if not parts:
            parts.append(("-" if neg_ else "") + body)
        else:
            parts.append((" - " if neg_ else " + ") + body)
    return "".join(parts) if parts else "0"


def commutator_table(alg):
    n = alg.dim
    return [[alg.bracket(_unit(n, i), _unit(n, j)) for j in range(n)] for i in range(n)]


def adjoint_table(alg, s=None):
    """Cell (i, j) is Ad(exp(s X_i)) X_j."""
    s = Symbol("s") if s is None else as_expr(s)
    return [alg.adjoint_matrix(i + 1, s) for i in range(alg.dim)]


def _unit(n, i):
    return [ONE if k == i else ZERO for k in range(n)]


def render_table(title, cells, names, lead_diagonal=False):
    n = len(names)
    text = [[format_element(cells[i][j], names, j if lead_diagonal else None) for j in range(n)] for i in range(n)]
    width = max([len(title)] + [len(x) for row in text for x in row] + [len(x) for x in names])
    lines = [" | ".join([title.ljust(width)] + [x.ljust(width) for x in names]).rstrip()]
    lines.append("-" * len(lines[0]))
    for i in range(n):
        lines.append(" | ".join([names[i].ljust(width)] + [x.ljust(width) for x in text[i]]).rstrip())
    return "\n".join(lines)


def render_matrix(M):
    text = [[to_text(as_expr(v)) for v in row] for row in M]
    width = max(len(x) for row in text for x in row)
    return "\n".join("[ " + "  ".join(x.rjust(width) for x in row) + " ]" for row in text)


def kpp3_basis():
    from .perturb import SPLIT_SPACE

    return [parse_vector_field(g, SPLIT_SPACE) for g in ("dt", "dx", "x*dx - 2*w*dw")]


def kpp3():
    """The approximate-symmetry algebra shared by the split KPP systems."""
    return structure_constants(kpp3_basis())


BUILTIN_ALGEBRAS = {"kpp3": kpp3}
