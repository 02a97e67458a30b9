import random

import pytest
from hypothesis import given, settings, strategies as st

from qdeform.classical import (
    HALF, ZERO_CFORM, ClassicalBackend, Metric, d as cd, dx, fn, ito_d, ito_wedge, timed_fn,
)
from qdeform.homotopy import (
    SphereBackend, TimedElem, axiom_suite, closedness_analysis, d_alpha, iso, iso_inv, laplacian,
    random_timed, timed, wedge_alpha,
)
from qdeform.laplace import MetricParams, laplacian as sphere_laplacian
from qdeform.qcoeff import ONE, ZERO, sym
from qdeform.qforms import SphereForm, d
from qdeform.qsl2 import normalize

s = sym("s")
SB = SphereBackend(MetricParams())
x1, x2 = sym("x1"), sym("x2")
CURVED = ClassicalBackend(Metric.diagonal(("x1", "x2"), [ONE, x1 * x1]), None, sym("alpha"), ZERO)
LINE = Metric.flat(("x",))
x = sym("x")


def test_d_alpha_at_zero_is_undeformed():
    rng = random.Random(1)
    for _ in range(10):
        el = random_timed(SB, rng, rng.randint(0, 2))
        got = d_alpha(el, ZERO, SB)
        rho = d(el.rho)
        for n, w in SB.components(el.omega).items():
            rho = rho + SB.dt(w).scale((-1) ** n)
        assert got == TimedElem(d(el.omega), rho)


def test_sphere_function_example():
    f = SphereForm(f0=normalize("bc"))
    got = d_alpha(timed(SB, f), s, SB)
    assert got == TimedElem(d(f), sphere_laplacian(f, SB.params).scale(s))


def test_ito_of_x_squared():
    # d_I x^2 = 2x dx + dt on the flat line
    assert ito_d(x * x, LINE) == TimedElem(dx("x").scale(2 * x), fn(ONE))


def test_stratonovich_correction_on_the_line():
    f = x ** 3
    got = ito_wedge(timed_fn(f), TimedElem(dx("x"), ZERO_CFORM), LINE)
    assert got == TimedElem(dx("x").scale(f), fn(HALF * f.diff("x")))


def test_function_times_one_form_on_curved_metric():
    al = sym("alpha")
    f = x1 * x2
    eta = dx("x2").scale(x1)
    got = wedge_alpha(timed_fn(f), TimedElem(eta, ZERO_CFORM), ONE, CURVED)
    # grad f = (x2, x1 / x1^2), so grad f into eta = x1 * (1 / x1)
    assert got == TimedElem(eta.scale(f), fn(al))


def test_wedge_alpha_zero_is_product():
    rng = random.Random(2)
    for _ in range(10):
        a, b = random_timed(SB, rng, 0), random_timed(SB, rng, 1)
        got = wedge_alpha(a, b, ZERO, SB)
        assert got.omega == SB.wedge(a.omega, b.omega)


def test_iso_identity_on_functions_and_inverse():
    rng = random.Random(3)
    for _ in range(10):
        f = random_timed(SB, rng, 0)
        assert iso(f, s, SB) == f
        y = random_timed(SB, rng, rng.randint(1, 2))
        assert iso_inv(iso(y, s, SB), s, SB) == y


def test_iso_intertwines_differentials():
    rng = random.Random(4)
    for _ in range(10):
        y = random_timed(SB, rng, rng.randint(0, 1))
        assert iso(d_alpha(y, ZERO, SB), s, SB) == d_alpha(iso(y, s, SB), s, SB)


@settings(max_examples=5)
@given(st.integers(0, 10_000))
def test_axioms_sphere(seed):
    res = axiom_suite(SB, s, samples=4, seed=seed)
    assert all(r.passed for r in res.values()), {k: r.failures for k, r in res.items()}
    assert "graded commutativity" not in res


@settings(max_examples=5)
@given(st.integers(0, 10_000))
def test_axioms_classical(seed):
    res = axiom_suite(CURVED, ONE, samples=4, seed=seed)
    assert all(r.passed for r in res.values()), {k: r.failures for k, r in res.items()}
    assert "graded commutativity" in res


class _DoubledOnFunctions(SphereBackend):
    """d scaled by 2 on 0-forms only: no longer a derivation."""

    def d(self, x):
        out = super().d(x)
        return out + super().d(x.component(0))


def test_axioms_detect_a_broken_differential():
    res = axiom_suite(_DoubledOnFunctions(MetricParams()), s, samples=30, seed=0)
    assert not res["Leibniz"].passed


def test_closedness_analysis():
    flat1 = ClassicalBackend(LINE, None, ONE, ZERO)
    al, t = sym("alpha"), sym("t")
    r = closedness_analysis(dx("x"), ZERO_CFORM, al, flat1)
    assert r.closed and r.dt_residual.is_zero()
    b = fn(x * x * t)
    a = laplacian(flat1, b).scale(al) + fn((x * x * t).diff("t"))
    r = closedness_analysis(cd(b), a, al, flat1, witness=b)
    assert r.closed and r.witness_residual.is_zero()
    r = closedness_analysis(cd(b), a + fn(x), al, flat1, witness=b)
    assert not r.closed
    assert r.as_dict()["closed"] is False


def test_timed_degree():
    assert TimedElem(dx("x1"), fn(ONE)).degree(CURVED) == 1
    assert TimedElem(dx("x1"), dx("x2")).degree(CURVED) is None


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_random_timed_has_requested_degree(degree):
    rng = random.Random(degree)
    for _ in range(5):
        el = random_timed(SB, rng, degree)
        assert el.is_zero() or el.degree(SB) == degree
