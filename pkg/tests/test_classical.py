import json
import random

import pytest
from hypothesis import given, strategies as st

from qdeform.classical import (
    DT, HALF, ZERO_CFORM, ClassicalBackend, Metric, TensorPair, VectorField, alpha_series, christoffel,
    d, delta_diff, delta_v, dx, fn, girsanov_residuals, gradient_drift, interior, ito_backend, ito_d,
    ito_display_residuals, ito_line_residuals, ito_product_check, ito_wedge, laplace_beltrami_check,
    laplace_display_check, lie_derivative_check, load_config, log_det_residuals, nabla_alpha,
    nabla_alpha_linear_display, nabla_leibniz_residual, nabla_undeformed_expected, parse_timed,
    random_diagonal_metric, random_metric, random_poly, render_timed, timed_fn, timed_form, wedge,
)
from qdeform.homotopy import TimedElem
from qdeform.qcoeff import ONE, ZERO, sym

x, x1, x2, t, al = (sym(n) for n in ("x", "x1", "x2", "t", "alpha"))
NAMES = ("x1", "x2")
FLAT = Metric.flat(NAMES)
DIAG = Metric.diagonal(NAMES, [ONE, x1 * x1])
LINE = Metric.flat(("x",))


def _metrics():
    rng = random.Random(5)
    return [FLAT, DIAG, random_metric(rng), random_metric(rng), random_diagonal_metric(rng)]


def test_christoffel_of_diag():
    G = christoffel(DIAG)
    assert G[1][0][1] == ONE / x1 and G[1][1][0] == ONE / x1
    assert G[0][1][1] == -x1
    assert G[0][0][0] == ZERO and G[0][0][1] == ZERO and G[1][1][1] == ZERO and G[1][0][0] == ZERO
    assert all(c.is_zero() for a in christoffel(FLAT) for b in a for c in b)


def test_christoffel_symmetry():
    for m in _metrics():
        G = m.christoffel
        assert all(G[k][a][b] == G[k][b][a] for k in range(2) for a in range(2) for b in range(2))


def test_metric_rejects_wrong_inverse():
    with pytest.raises(ValueError):
        Metric(NAMES, [[1, 0], [0, 2]], [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        Metric(("x1", "x1"), [[1, 0], [0, 1]], [[1, 0], [0, 1]])


def test_forms_basics():
    assert d(d(fn(x1 ** 2 * x2))).is_zero()
    assert wedge(dx("x2"), dx("x1")) == dx("x1", "x2").scale(-1)
    assert wedge(dx("x1"), dx("x1")).is_zero()
    assert interior("x2", dx("x1", "x2")) == dx("x1").scale(-1)


poly = st.builds(lambda seed: random_poly(random.Random(seed), NAMES + ("t",), 3, 3), st.integers(0, 10_000))


@given(poly, poly, poly)
def test_classical_leibniz_and_d_squared(f, g, h):
    eta = dx("x1").scale(g) + dx("x2").scale(h)
    assert d(wedge(fn(f), eta)) == wedge(d(fn(f)), eta) + wedge(fn(f), d(eta))
    assert d(d(eta)).is_zero()


def test_delta_diff_examples():
    assert delta_diff(dx("x1"), FLAT).is_zero()
    f = x1 ** 2 * x2
    assert delta_diff(dx("x1").scale(f), FLAT) == fn(f.diff("x1"))
    assert delta_diff(fn(f), FLAT).is_zero()


def test_delta_v_examples():
    assert delta_v(dx("x1", "x2"), VectorField(NAMES, [1, 0])) == dx("x2")
    assert delta_v(dx("x1", "x2"), VectorField(NAMES, [0, 1])) == dx("x1").scale(-1)
    v = VectorField(NAMES, [x2, x1])
    f = x1 * x2 ** 2
    assert delta_v(d(fn(f)), v) == fn(x2 * f.diff("x1") + x1 * f.diff("x2"))


@given(poly, poly)
def test_drift_term_is_tensorial(f, g):
    v = VectorField(NAMES, [x2, ONE + x1])
    eta = dx("x1").scale(g)
    assert delta_v(eta.scale(f), v) == delta_v(eta, v).scale(f)


@pytest.mark.parametrize("k", range(5))
def test_laplace_forms(k):
    m = _metrics()[k]
    rng = random.Random(k)
    for f in [x2, random_poly(rng, NAMES, 3, 3)]:
        assert laplace_beltrami_check(m, f).is_zero()
        assert laplace_display_check(m, f).is_zero()
    assert log_det_residuals(m) == []


def test_lie_derivative():
    assert lie_derivative_check(VectorField(NAMES, [x1, 0]), dx("x1")).is_zero()
    assert lie_derivative_check(VectorField(NAMES, [2, 3]), dx("x2")).is_zero()
    rng = random.Random(7)
    for _ in range(5):
        v = VectorField(NAMES, [random_poly(rng, NAMES, 2) for _ in NAMES])
        eta = dx("x1").scale(random_poly(rng, NAMES, 2)) + dx("x2").scale(random_poly(rng, NAMES, 2))
        assert lie_derivative_check(v, eta).is_zero()


def test_ito_coordinate_differential():
    # d_I x^l = dx^l + (v^l - 1/2 g^{jk} Gamma^l_jk) dt
    v = VectorField(NAMES, [x2, x1 * x2])
    G, gi = DIAG.christoffel, DIAG.g_inv
    for l, name in enumerate(NAMES):
        corr = sum((gi[j][k] * G[l][j][k] for j in range(2) for k in range(2)), ZERO)
        assert ito_d(sym(name), DIAG, v) == TimedElem(dx(name), fn(v.components[l] - HALF * corr))
    assert ito_d(3, DIAG, v).is_zero()


def test_ito_line():
    assert all(r.is_zero() for r in ito_line_residuals().values())


def test_ito_displays_on_metrics():
    rng = random.Random(11)
    for m in _metrics():
        f = random_poly(rng, NAMES + ("t",), 3, 3)
        h = random_poly(rng, NAMES + ("t",), 3, 3)
        v = VectorField(NAMES, [random_poly(rng, NAMES, 2) for _ in NAMES])
        res = ito_display_residuals(f, h, m, v)
        assert res and all(r.is_zero() for r in res.values()), {k: str(r) for k, r in res.items() if not r.is_zero()}
        assert ito_product_check(f, h, m, v).is_zero()


def test_ito_product_on_the_line():
    assert ito_product_check(x, x, LINE).is_zero()
    assert ito_product_check(3, x ** 2, LINE).is_zero()


@given(poly)
def test_functions_commute_with_one_forms(f):
    eta = timed_form(dx("x1").scale(x2) + dx("x2"))
    v = VectorField(NAMES, [x1, 1])
    assert ito_wedge(timed_fn(f), eta, DIAG, v) == ito_wedge(eta, timed_fn(f), DIAG, v)


def test_girsanov_constant_drift():
    r = girsanov_residuals(LINE, VectorField(("x",), [3]))
    assert r.R1.is_zero() and r.R2.is_zero() and r.kappa.is_zero()


@pytest.mark.parametrize("k", range(5))
def test_girsanov_gradient_drift(k):
    m = _metrics()[k]
    F = random_poly(random.Random(k), NAMES + ("t",), 3, 3)
    r = girsanov_residuals(m, gradient_drift(F, m))
    assert r.R2.is_zero()
    assert r.kappa.is_zero()
    assert (r.R1 + r.E1).is_zero()


@pytest.mark.parametrize("k", range(5))
def test_girsanov_structure_for_any_drift(k):
    m = _metrics()[k]
    rng = random.Random(100 + k)
    v = VectorField(NAMES, [random_poly(rng, NAMES + ("t",), 2) for _ in NAMES])
    r = girsanov_residuals(m, v)
    assert (r.kappa - r.kappa_display).is_zero()
    assert r.structure.is_zero()
    assert (r.R2 - r.R2_direct).is_zero()


def test_kappa_nonzero_without_gradient_condition():
    # the vanishing of kappa needs R2 = 0; see the decisions ledger
    v = VectorField(NAMES, [ZERO, x1])
    r = girsanov_residuals(DIAG, v)
    assert not r.R2.is_zero()
    assert not r.kappa.is_zero()
    assert r.kappa == r.kappa_display


def test_nabla_undeformed_limit():
    for m in (FLAT, DIAG):
        for k in NAMES:
            assert nabla_alpha(dx(k), m, ZERO) == nabla_undeformed_expected(k, m)
            assert alpha_series(nabla_alpha(dx(k), m, al), 0) == nabla_undeformed_expected(k, m)


def test_nabla_flat_has_no_correction():
    for k in NAMES:
        assert nabla_alpha(dx(k), FLAT, al).is_zero()


def test_nabla_alpha_linear_part_on_diag():
    T1 = alpha_series(nabla_alpha(dx("x1"), DIAG, al), 1)
    assert T1 == TensorPair({"x1": TimedElem(ZERO_CFORM, fn(ONE / (x1 * x1)))})
    T2 = alpha_series(nabla_alpha(dx("x2"), DIAG, al), 1)
    assert T2 == TensorPair({"dt": timed_form(dx("x2").scale(-ONE / (x1 * x1)))})


def test_nabla_linear_display_mismatch_for_second_coordinate():
    # the displayed combination agrees for k = 1 and misplaces the dt leg for k = 2
    assert alpha_series(nabla_alpha(dx("x1"), DIAG, al), 1) == nabla_alpha_linear_display("x1", DIAG)
    assert alpha_series(nabla_alpha(dx("x2"), DIAG, al), 1) != nabla_alpha_linear_display("x2", DIAG)


@pytest.mark.parametrize("metric", [FLAT, DIAG], ids=["flat", "diag"])
def test_nabla_leibniz(metric):
    rng = random.Random(3)
    B = ClassicalBackend(metric, None, ONE, ZERO)
    for _ in range(3):
        f = timed_fn(random_poly(rng, NAMES + ("t",), 2))
        xi = timed_form(dx(rng.choice(NAMES)).scale(random_poly(rng, NAMES, 2)))
        assert nabla_leibniz_residual(f, xi, metric, al, B).is_zero()


def test_load_config(tmp_path):
    cfg = {"coords": ["x1", "x2"], "g": [["1", 0], [0, "x1^2"]], "v": ["x2", "x1*x2 + 1"]}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(cfg))
    for src in (path, json.dumps(cfg), cfg):
        c = load_config(src)
        assert c.metric == DIAG
        assert c.v.components == (x2, x1 * x2 + 1)
    with pytest.raises(ValueError):
        load_config({"coords": ["x1", "x2"], "g": [[1, 1], [1, 2]]})


def test_timed_text_round_trip():
    el = TimedElem(dx("x1").scale(x2) + fn(t), dx("x2").scale(-ONE / (ONE + x1 ** 2)))
    assert parse_timed(render_timed(el)) == el
    assert parse_timed("dx1*dx2 + dt") == TimedElem(dx("x1", "x2"), fn(ONE))
    assert parse_timed("0") == TimedElem(ZERO_CFORM, ZERO_CFORM)
    assert DT == parse_timed("dt")


def test_backend_delta_combination():
    v = VectorField(NAMES, [x2, 1])
    B = ito_backend(DIAG, v)
    eta = dx("x1").scale(x1 * x2)
    assert B.delta(eta) == delta_diff(eta, DIAG).scale(HALF) + delta_v(eta, v)
