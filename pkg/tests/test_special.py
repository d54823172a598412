import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kppsym.errors import DomainError
from kppsym.special import BRANCH_POINT, erf, lambert_w
from oracles import erf_series


def test_erf_examples():
    assert erf(0.0) == 0.0
    assert abs(erf(1.0) - 0.842700792949715) < 1e-12


def test_erf_series_oracle_on_grid():
    xs = np.linspace(-6, 6, 1201)
    worst = max(abs(erf(float(v)) - erf_series(v)) for v in xs)
    assert worst < 1e-12


def test_erf_array_matches_scalar():
    xs = np.linspace(-6, 6, 101)
    arr = erf(xs)
    assert all(arr[i] == erf(float(v)) for i, v in enumerate(xs))


@given(st.floats(-30, 30, allow_nan=False))
def test_erf_odd_and_bounded(v):
    assert erf(-v) == -erf(v)
    assert -1.0 <= erf(v) <= 1.0
    if abs(v) < 5:
        assert -1.0 < erf(v) < 1.0


def test_lambert_examples():
    assert lambert_w(0.0) == 0.0
    assert abs(lambert_w(math.e) - 1.0) < 1e-15
    assert lambert_w(BRANCH_POINT) == -1.0
    with pytest.raises(DomainError):
        lambert_w(BRANCH_POINT - 1e-9)


def test_lambert_array_nan_below_branch():
    got = lambert_w(np.array([-1.0, 0.0, 1.0]))
    assert np.isnan(got[0]) and got[1] == 0.0


def test_lambert_defining_identity_on_range():
    z = np.concatenate([np.linspace(BRANCH_POINT + 1e-6, 0, 3000, endpoint=False), np.geomspace(1e-8, 1e3, 3000)])
    w = lambert_w(z)
    assert np.all(w >= -1.0)
    rel = np.abs(w * np.exp(w) - z) / np.abs(z)
    assert rel.max() < 1e-12


def test_lambert_matches_mpmath():
    for z in (BRANCH_POINT + 1e-6, -0.2, 0.1, 1.0, 7.5, 1e3):
        assert lambert_w(z) == pytest.approx(float(mpmath.lambertw(z).real), rel=1e-12, abs=1e-13)


def test_round_trips_at_random_points():
    rng = np.random.default_rng(11)
    w = rng.uniform(-1.0, 6.0, 10_000)
    back = lambert_w(w * np.exp(w))
    assert np.max(np.abs(back - w) / (1 + np.abs(w))) < 1e-9
    z = rng.uniform(BRANCH_POINT, 1e3, 10_000)
    ww = lambert_w(z)
    assert np.max(np.abs(ww * np.exp(ww) - z) / np.maximum(np.abs(z), 1e-300)) < 1e-12
    x = rng.uniform(-6, 6, 10_000)
    assert np.all(erf(-x) == -erf(x))
    assert np.max(np.abs(erf(x) + erf(-x))) == 0.0


@settings(max_examples=300)
@given(st.floats(BRANCH_POINT, 1e3))
def test_lambert_identity_property(z):
    w = lambert_w(z)
    assert w >= -1.0
    assert abs(w * math.exp(w) - z) <= 1e-12 * abs(z) + 1e-300
