import pytest
from hypothesis import given, strategies as st

from qdeform.qcoeff import qint, qpow
from qdeform.qforms import (
    E_MINUS, E_PLUS, ONE_FORM, V_MINUS, V_PLUS, VOLUME, ZERO_FORM, SphereForm, Tensor, commute, d,
    d0, interior, monomial_forms, nabla, nabla_formula, wedge,
)
from qdeform.qsl2 import AlgElem, GradeError, gen, mono, multiply, normalize

q = qpow(1)
a, b, c, dd = (gen(x) for x in "abcd")
FORMS = {k: monomial_forms(k, 2) for k in (0, 1, 2)}


def test_commute():
    assert commute("+", a) == (a, q)
    assert commute("-", normalize("bc"))[1] == qpow(0)
    with pytest.raises(ValueError):
        commute("x", a)


def test_wedge_relations():
    assert wedge(E_PLUS, E_PLUS).is_zero()
    assert wedge(E_MINUS, E_MINUS).is_zero()
    assert wedge(E_PLUS, E_MINUS) == VOLUME
    assert wedge(E_MINUS, E_PLUS) == VOLUME.scale(-qpow(2))
    f, g = SphereForm(f0=normalize("bc")), SphereForm(f0=normalize("ab"))
    assert wedge(f, g) == SphereForm(f0=multiply(normalize("bc"), normalize("ab")))


def test_d_on_generators_and_unit():
    # da = q b e+ = q^2 e+ b
    assert d(SphereForm(f0=a)) == SphereForm(fp=b.scale(qpow(2)))
    assert d(ONE_FORM).is_zero()
    assert d(E_PLUS).is_zero() and d(E_MINUS).is_zero()


def test_d_of_bc_by_hand():
    # d(bc) = (a e-) c + b (q d e+) = q^-1 e- ac + q^2 e+ db
    want = SphereForm(fm=normalize("ac").scale(qpow(-1)), fp=normalize("db").scale(qpow(2)))
    assert d(SphereForm(f0=normalize("bc"))) == want


@pytest.mark.parametrize("m", range(1, 4))
def test_d_of_bm_cm_display(m):
    x = SphereForm(f0=AlgElem.monomial(mono("a", 0, m, m)))
    want = SphereForm(
        fm=AlgElem.monomial(mono("a", 1, m - 1, m), qint(m) * qpow(-1)),
        fp=AlgElem.monomial(mono("d", 1, m, m - 1), qint(m) * qpow(4 - 2 * m)),
    )
    assert d(x) == want


def test_d_squared_on_sphere():
    for k in (0, 1):
        for x in monomial_forms(k, 3):
            assert d(d(x)).is_zero(), x


def test_monomial_forms_are_grade_valid():
    for k, forms in FORMS.items():
        assert forms
        for x in forms:
            assert x.is_valid()
            assert x.degrees() == {k}


def test_grade_validation():
    with pytest.raises(GradeError):
        SphereForm(fp=a, check=True)
    SphereForm(fp=normalize("bb"), check=True)


form = st.sampled_from(FORMS[0] + FORMS[1] + FORMS[2])


@given(form, form)
def test_graded_leibniz(x, y):
    (k,) = x.degrees()
    assert d(wedge(x, y)) == wedge(d(x), y) + wedge(x, d(y)).scale((-1) ** k)


@given(form, form, form)
def test_wedge_associative(x, y, z):
    assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))


def test_interior():
    assert interior(V_PLUS, VOLUME) == SphereForm(fm=AlgElem.scalar("gamma"))
    assert interior(V_MINUS, VOLUME) == SphereForm(fp=AlgElem.scalar("eps")).scale(-1)
    assert interior(V_PLUS, SphereForm(fm=normalize("ac"))).is_zero()
    assert interior(V_PLUS, E_PLUS) == ONE_FORM
    with pytest.raises(ValueError):
        interior(V_PLUS, ONE_FORM)


def test_nabla_example():
    x = SphereForm(fp=normalize("abbb"))
    assert nabla(x) == Tensor.pair(d0(normalize("abbb")), E_PLUS).scale(qpow(-2))
    assert nabla(E_PLUS).is_zero() and nabla(E_MINUS).is_zero()


def test_nabla_matches_formula_on_one_forms():
    for x in monomial_forms(1, 3):
        assert nabla(x) == nabla_formula(x), x


@given(st.sampled_from(FORMS[0]), st.sampled_from(FORMS[1]))
def test_nabla_left_leibniz(h, xi):
    lhs = nabla(wedge(h, xi))
    rhs = Tensor.pair(d(h), xi) + nabla(xi).left_mul(h.f0)
    assert lhs == rhs


def test_components():
    x = ONE_FORM + E_PLUS + VOLUME
    assert x.component(1) == E_PLUS
    assert x.degrees() == {0, 1, 2}
    assert (x - x) == ZERO_FORM
