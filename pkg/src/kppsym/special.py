"""Error function and principal-branch Lambert W for real arguments."""

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

BRANCH_POINT = -math.exp(-1.0)


def erf(x):
    """Error function, (2/sqrt(pi)) * integral_0^x exp(-t^2) dt.

    Scalars in, float out; arrays in, arrays out.  Odd symmetry is exact.
    """
    if np.ndim(x) == 0:
        x = float(x)
        if x < 0:
            return -float(_sp.erf(-x))
        return float(_sp.erf(x))
    x = np.asarray(x, dtype=float)
    return np.sign(x) * _sp.erf(np.abs(x))


def _initial_guess(z):
    w = np.empty_like(z)
    near = z < -0.25
    p = np.sqrt(np.maximum(2.0 * (math.e * z[near] + 1.0), 0.0))
    w[near] = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    mid = (~near) & (z <= 3.0)
    w[mid] = np.log1p(z[mid]) * (1.0 - np.log1p(np.log1p(z[mid])) / (2.0 + np.log1p(z[mid])))
    big = z > 3.0
    lz = np.log(z[big])
    w[big] = lz - np.log(lz) + np.log(lz) / lz
    return w


def _halley(z, w, iters=40):
    active = np.ones(z.shape, dtype=bool)
    for _ in range(iters):
        if not active.any():
            break
        wa = w[active]
        za = z[active]
        ew = np.exp(wa)
        f = wa * ew - za
        wp1 = wa + 1.0
        denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(denom != 0.0, f / denom, 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        wa = wa - step
        w[active] = wa
        done = np.abs(step) <= 1e-15 * (1.0 + np.abs(wa))
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return w


def lambert_w(z):
    """Principal branch W0 of z = W exp(W) for real z >= -1/e.

    Scalar input raises DomainError below the branch point; array input
    yields NaN there.
    """
    scalar = np.ndim(z) == 0
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if scalar and za[0] < BRANCH_POINT:
        raise DomainError(f"lambert_w undefined for z={za[0]!r} < -1/e")
    w = np.full(za.shape, np.nan)
    ok = za >= BRANCH_POINT
    at_branch = za == BRANCH_POINT
    zero = za == 0.0
    rest = ok & ~at_branch & ~zero & np.isfinite(za)
    if rest.any():
        zr = za[rest]
        w[rest] = _halley(zr, _initial_guess(zr))
    w[at_branch] = -1.0
    w[zero] = 0.0
    w[za == np.inf] = np.inf
    if scalar:
        return float(w[0])
    return w.reshape(np.shape(z))
