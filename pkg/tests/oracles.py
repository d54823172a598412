"""Independent oracles shared by the module tests and the acceptance suite."""

import mpmath

from kppsym.expr import Symbol, add, differentiate, mul, parse, substitute


def erf_series(x, dps=80):
    """Maclaurin series of erf summed to convergence in high precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        term = x
        total = x
        n = 0
        x2 = x * x
        while True:
            n += 1
            term *= -x2 / n
            add_ = term / (2 * n + 1)
            total += add_
            if abs(add_) < mpmath.mpf(10) ** (-dps + 5):
                break
        return float(2 / mpmath.sqrt(mpmath.pi) * total)


def taylor_order1(reaction):
    """R(v + eps w) expanded by differentiation in eps at eps = 0."""
    eps = Symbol("eps")
    shifted = substitute(reaction, {"u": add(Symbol("v"), mul(eps, Symbol("w")))})
    r0 = substitute(shifted, {"eps": 0})
    r1 = substitute(differentiate(shifted, "eps"), {"eps": 0})
    return r0, r1


def heat_family(quad="c1*x^2/(4*eps)", F="0"):
    """Closed-form heat infinitesimals with symbolic c1..c6 and free term F."""
    return {
        "xi": parse("c1*t*x + c2*x - 2*eps*c4*t + c6"),
        "tau": parse("c1*t^2 + 2*c2*t + c3"),
        "phi": parse(f"(c4*x + c5 - c1*t/2 - {quad})*u + {F}"),
    }
