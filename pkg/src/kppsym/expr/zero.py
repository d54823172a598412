"""Zero testing: exact ring normalisation first, randomized numerics second."""

import random

from ..errors import DomainError, UnboundSymbol
from .core import Power, Rational, Sum, ZERO, _split_term, as_expr, mul, terms
from .evaluate import evaluate

SYMBOLIC = "zero"
PROBABLE = "probably_zero"
NONZERO = "nonzero"


def clear_denominators(e):
    """Multiply ``e`` by every negative integer power of a sum it contains.

    The result vanishes iff ``e`` does (where defined); with sums in
    denominators this often exposes a cancellation that ring normalisation
    alone misses.
    """
    e = as_expr(e)
    worst = {}
    for t in terms(e):
        _, fs = _split_term(t)
        for b, x in fs:
            if isinstance(b, Sum) and isinstance(x, Rational) and x.value < 0:
                k = -x.value
                # fractional exponents: clear the ceiling
                k = -(-k.numerator // k.denominator)
                if k > worst.get(b, (None, 0))[1]:
                    worst[b] = (b, k)
    if not worst:
        return e
    return mul(e, *[Power(b, Rational(k)) for b, k in worst.values()])


def zero_test(e, trials=20, seed=0, lo=0.1, hi=2.0, rtol=1e-9):
    """Classify ``e`` as ``"zero"``, ``"probably_zero"`` or ``"nonzero"``.

    ``"zero"`` is a symbolic certificate; ``"probably_zero"`` means the
    expression did not normalise to zero but vanished at ``trials`` random
    points (each coordinate drawn from [lo, hi]) to within
    ``rtol * (1 + sum of |term values|)``.
    """
    e = as_expr(e)
    if e == ZERO:
        return SYMBOLIC
    cleared = clear_denominators(e)
    if cleared == ZERO:
        return SYMBOLIC
    names = sorted(e.free_names())
    rng = random.Random(seed)
    done = 0
    attempts = 0
    parts = terms(e)
    while done < trials and attempts < trials * 10:
        attempts += 1
        point = {n: rng.uniform(lo, hi) for n in names}
        try:
            vals = [evaluate(t, point) for t in parts]
        except (DomainError, UnboundSymbol, OverflowError):
            continue
        total = sum(vals)
        scale = 1.0 + sum(abs(v) for v in vals)
        if total != total or abs(total) > rtol * scale:
            return NONZERO
        done += 1
    if done == 0:
        return NONZERO
    return PROBABLE


def is_zero(e, **kw):
    """True when :func:`zero_test` does not report ``"nonzero"``."""
    return zero_test(e, **kw) != NONZERO
