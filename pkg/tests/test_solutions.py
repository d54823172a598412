import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_ivp
from scipy.optimize import least_squares

from kppsym.errors import DomainError, NotAffine
from kppsym.expr import Symbol, differentiate, evaluate, parse, substitute
from kppsym.jet import parse_vector_field
from kppsym.perturb import SPLIT_SPACE
from kppsym.solutions import (
    CATALOG,
    CORRECTED_FORM,
    PAPER_FORM,
    Exclusion,
    Grid,
    SolutionEntry,
    epsilon_coefficient,
    flow,
    get_entry,
    kpp3_field,
    order_scaling,
    residual,
    transform_solution,
)

PASSING = ["fick_wave", "fick_erf", "fisher_x3", "nws_x3", "zeldovich_x3_corrected", "az_wave"]


def test_catalog_complete():
    need = {"fick_wave", "fick_erf", "fisher_x3", "fisher_wave", "az_wave", "zeldovich_x3", "zeldovich_x3_corrected", "nws_x3"}
    assert need <= set(CATALOG)
    assert CATALOG["zeldovich_x3"].provenance == PAPER_FORM
    assert CATALOG["zeldovich_x3_corrected"].provenance == CORRECTED_FORM
    assert CATALOG["az_wave"].provenance == CORRECTED_FORM


@pytest.mark.parametrize("entry_id", PASSING)
def test_residual_passes(entry_id):
    rep = residual(CATALOG[entry_id])
    assert rep.sup_norm < 1e-9 and rep.verdict() == "pass"
    assert rep.n_points > 0 and rep.l2_norm <= rep.sup_norm


def test_split_entries_report_both_orders():
    rep = residual(CATALOG["fisher_x3"])
    assert set(rep.components) == {"order0", "order1"}
    assert all(c["sup_norm"] < 1e-9 for c in rep.components.values())


def test_paper_form_verdicts_recorded():
    z = residual(CATALOG["zeldovich_x3"])
    assert z.verdict() == "fail" and z.components["order0"]["sup_norm"] > 1.0
    fw = residual(CATALOG["fisher_wave"])
    assert fw.components["order0"]["sup_norm"] < 1e-9
    assert fw.components["order1"]["sup_norm"] > 1e-2
    azp = residual(CATALOG["az_wave_reference"])
    assert azp.verdict() == "fail"
    # the reference amplitude eps/sqrt(6) with k = sqrt(6) is exact only at eps = 1/36
    assert residual(CATALOG["az_wave_reference"], epsilon=1 / 36).sup_norm < 1e-9


def test_fick_examples_parameters():
    e = CATALOG["fick_wave"]
    assert e.params == {"c": 1, "c1": 0, "c2": 1} and e.grid.x_range == (-2.0, 2.0)
    assert CATALOG["fick_erf"].grid.x_range == (0.2, 3.0)


def test_fick_erf_across_origin_with_exclusion():
    g = Grid((-3.0, 3.0), (0.1, 2.0), 51, 50, (Exclusion("x", 0.0, 0.1),))
    rep = residual(CATALOG["fick_erf"], g)
    assert rep.sup_norm < 1e-9 and rep.n_points == 50 * 50


def test_exact_entries_at_other_epsilons():
    for eps in (0.01, 0.5, 1.0):
        assert residual(CATALOG["fick_wave"], epsilon=eps).sup_norm < 1e-9 * max(1, 1 / eps)


def _az_defect(k, w, a, eps, X, T):
    u = parse("(1 + exp(k*x - w*t))^(-2)")
    d = differentiate(u, "t") - Symbol("eps") * differentiate(differentiate(u, "x"), "x") - Symbol("a") * u * (1 - u)
    return evaluate(d, {"k": k, "w": w, "a": a, "eps": eps, "x": X, "t": T}, strict=False)


@pytest.mark.parametrize("a, eps", [(1.0, 0.1), (2.0, 0.3)])
def test_az_constants_from_least_squares(a, eps):
    X, T = np.meshgrid(np.linspace(-2, 2, 25), np.linspace(0.1, 2, 25))
    fit = least_squares(lambda p: _az_defect(p[0], p[1], a, eps, X.ravel(), T.ravel()), x0=[1.0, 1.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    k, w = fit.x
    assert abs(k - math.sqrt(a / (6 * eps))) < 1e-8
    assert abs(w - 5 * a / 6) < 1e-8
    entry = get_entry("az_wave", a=a)
    assert residual(entry, epsilon=eps).sup_norm < 1e-9


def test_zeldovich_corrected_against_ode_integration():
    e = CATALOG["zeldovich_x3_corrected"]
    b = e.binding()
    ts = np.linspace(0.1, 2.0, 40)
    v_exact = np.array([evaluate(e.order0, {**b, "t": t, "x": 1.0}) for t in ts])
    g_exact = np.array([evaluate(e.order1, {**b, "t": t, "x": 1.0}) for t in ts])

    def rhs(t, y):
        v, g = y
        return [v * v * (1 - v), g * (2 * v - 3 * v * v)]

    sol = solve_ivp(rhs, (ts[0], ts[-1]), [v_exact[0], g_exact[0]], t_eval=ts, rtol=1e-12, atol=1e-14, method="DOP853")
    assert np.max(np.abs(sol.y[0] - v_exact)) < 1e-6
    assert np.max(np.abs(sol.y[1] - g_exact)) < 1e-6


def test_zeldovich_paper_form_departs_from_ode():
    e = CATALOG["zeldovich_x3"]
    b = e.binding()
    v = lambda t: evaluate(e.order0, {**b, "t": t, "x": 1.0})
    sol = solve_ivp(lambda t, y: [y[0] ** 2 * (1 - y[0])], (0.1, 2.0), [v(0.1)], rtol=1e-12, atol=1e-14)
    assert abs(sol.y[0][-1] - v(2.0)) > 1e-2


# ---- order scaling


@pytest.mark.parametrize("entry_id", ["fisher_x3", "nws_x3"])
def test_order_scaling_slope_two(entry_id):
    rep = order_scaling(CATALOG[entry_id])
    assert rep.status == "scaling"
    assert abs(rep.fitted_exponent - 2.0) <= 0.2
    assert all(abs(s - 2.0) <= 0.2 for s in rep.slopes)
    predicted = rep.oracle_sup * 1e-4
    assert abs(rep.sup_norms[1] - predicted) <= 0.05 * predicted


def test_eps2_coefficient_fisher_closed_form():
    e = CATALOG["fisher_x3"]
    got = epsilon_coefficient(e)
    w = e.order1
    expected = Symbol("a") * w**2 - differentiate(differentiate(w, "x"), "x")
    b = {**e.binding(), "x": 1.3, "t": 0.7}
    assert evaluate(got, b) == pytest.approx(evaluate(expected, b), rel=1e-12)


def test_exact_entry_scaling_status():
    rep = order_scaling(CATALOG["fick_wave"])
    assert rep.status == "exact" and rep.fitted_exponent is None
    assert all(s < 1e-9 for s in rep.sup_norms)


def test_order_scaling_validation():
    with pytest.raises(ValueError):
        order_scaling(CATALOG["fisher_x3"], eps_list=(1e-1, 1e-2))
    with pytest.raises(ValueError):
        order_scaling(CATALOG["fisher_x3"], eps_list=(1e-3, 1e-2, 1e-1))


# ---- flows


def test_flow_images():
    assert flow(kpp3_field(1)).images == {"t": parse("t + s"), "x": Symbol("x"), "v": Symbol("v"), "w": Symbol("w")}
    assert flow(kpp3_field(2)).images["x"] == parse("x + s")
    g3 = flow(kpp3_field(3)).images
    assert g3["x"] == parse("x*exp(s)") and g3["w"] == parse("w*exp(-2*s)")
    assert g3["t"] == Symbol("t") and g3["v"] == Symbol("v")


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.floats(-1, 1), st.floats(-1, 1), st.floats(-2, 2), st.floats(-2, 2))
def test_flow_group_law(i, s1, s2, x, w):
    F = flow(kpp3_field(i))
    p = {"t": 0.3, "x": x, "v": 0.5, "w": w}
    once = F(F(p, s1), s2)
    both = F(p, s1 + s2)
    for k in p:
        assert abs(once[k] - both[k]) <= 1e-12 * (1 + abs(both[k]))


def test_flow_of_nonaffine_field():
    with pytest.raises(NotAffine):
        flow(parse_vector_field("x^2*dx", SPLIT_SPACE))
    with pytest.raises(NotAffine):
        flow(parse_vector_field("exp(x)*dx", SPLIT_SPACE))


def test_flow_of_mixed_linear_field():
    # x -> x + s t is nilpotent, w -> w e^(3s) is geometric
    F = flow(parse_vector_field("t*dx + 3*w*dw", SPLIT_SPACE))
    assert F.images["x"] == parse("x + s*t") and F.images["w"] == parse("w*exp(3*s)")


# ---- group transforms


@pytest.mark.parametrize("entry_id", ["fisher_x3", "nws_x3"])
@pytest.mark.parametrize("i", [1, 2, 3])
@pytest.mark.parametrize("s", [-0.5, 0.3, 1.0])
def test_transformed_entries_pass(entry_id, i, s):
    new = transform_solution(CATALOG[entry_id], i, s)
    assert residual(new).sup_norm < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(-100, 100).map(lambda k: k / 100))
def test_transform_preserves_verdicts(i, s):
    for entry_id in ("fisher_x3", "nws_x3", "zeldovich_x3_corrected", "zeldovich_x3"):
        e = CATALOG[entry_id]
        try:
            before = residual(e).verdict()
            after = residual(transform_solution(e, i, s)).verdict()
        except DomainError:
            continue
        assert before == after


def test_transform_formulas():
    e = CATALOG["fisher_x3"]
    g1 = transform_solution(e, 1, 0.7)
    assert g1.order0 == substitute(e.order0, {"t": parse("t - 7/10")})
    assert g1.order1 == substitute(e.order1, {"t": parse("t - 7/10")})
    g3 = transform_solution(e, 3, 0.3)
    sh = {"x": parse("x*exp(-3/10)")}
    assert g3.order0 == e.order0
    b = {**e.binding(), "x": 1.7, "t": 0.9}
    want = math.exp(-0.6) * evaluate(substitute(e.order1, sh), b)
    assert evaluate(g3.order1, b) == pytest.approx(want, rel=1e-14)


def test_translation_of_absent_variable():
    e = CATALOG["nws_x3"]
    g2 = transform_solution(e, 2, 0.4)
    assert g2.order0 == e.order0 and g2.order1 == e.order1
    assert residual(g2).sup_norm == residual(e, g2.grid).sup_norm


@pytest.mark.parametrize("entry", ["fick_wave", "fick_erf", "az_wave"])
def test_transform_exact_entry(entry):
    # translations are exact symmetries; the x-scaling is only approximate
    e = CATALOG[entry]
    for i in (1, 2):
        img = transform_solution(e, i, 0.3)
        assert img.is_exact and residual(img).verdict() == "pass"
    assert residual(transform_solution(e, 3, 0.3)).verdict() == "fail"


def test_transformed_grid_is_image():
    e = CATALOG["fisher_x3"]
    g = transform_solution(e, 3, 1.0).grid
    assert g.x_range == pytest.approx((0.5 * math.e, 3.0 * math.e))
    assert transform_solution(e, 1, -0.5).grid.t_range == pytest.approx((-0.4, 1.5))


# ---- grids and domain handling


def test_skipped_points_counted():
    g = Grid((-1.0, 1.0), (0.1, 2.0), 21, 20)
    rep = residual(CATALOG["fisher_x3"], g)
    assert rep.skipped == 20 and rep.sup_norm < 1e-9


def test_too_many_skipped_points():
    with pytest.raises(DomainError):
        residual(get_entry("zeldovich_x3_corrected", c1=-1), Grid((0.5, 3.0), (-3.0, -1.0)))
    with pytest.raises(DomainError):
        residual(CATALOG["zeldovich_x3"], Grid((0.5, 3.0), (-3.0, -1.5)))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(nx=1)
    with pytest.raises(ValueError):
        Grid((1.0, 0.0))
    with pytest.raises(ValueError):
        Grid((0.0, math.inf))


def test_epsilon_range():
    with pytest.raises(ValueError):
        residual(CATALOG["fick_wave"], epsilon=0.0)


def test_get_entry_parameters():
    e = get_entry("fisher_x3", a=2, c1=3)
    assert e.params["a"] == 2 and CATALOG["fisher_x3"].params["a"] == 1
    assert residual(e).sup_norm < 1e-9
    assert residual(get_entry("nws_x3", sgn=-1)).sup_norm < 1e-9
    with pytest.raises(KeyError):
        get_entry("fisher_x3", q=1)
    with pytest.raises(KeyError):
        get_entry("nope")


def test_entry_symbol_check():
    with pytest.raises(ValueError):
        SolutionEntry("bad", "fisher", "y*t", "t")
    with pytest.raises(ValueError):
        SolutionEntry("bad", "fisher", "eps*t", "t")


def test_norms_deterministic():
    a = residual(CATALOG["fisher_wave"])
    b = residual(CATALOG["fisher_wave"])
    assert a.as_dict() == b.as_dict()
