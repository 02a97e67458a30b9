import random

import pytest
from hypothesis import given, strategies as st

from qdeform.parsing import ParseError, parse, parse_alg, parse_form, parse_scalar, render_alg, render_form
from qdeform.qcoeff import I, ONE, QScalar, qpow, render_scalar, sym
from qdeform.qforms import E_MINUS, E_PLUS, VOLUME, SphereForm
from qdeform.qsl2 import AlgElem, GradeError, gen, mono, monomials_of_grade, normalize, star

q = qpow(1)


def test_algebra_examples():
    assert parse_alg("q^2*a*b") == normalize("ab").scale(qpow(2))
    assert parse_alg("abc") == normalize("abc")
    assert parse_alg("d a") == normalize("da")
    assert parse_alg("star(a)") == star(gen("a"))
    assert parse_alg("(1+q)^-1 * b") == gen("b").scale(ONE / (ONE + q))
    assert parse_alg("a^0") == AlgElem.scalar(1)


def test_form_examples():
    x = parse_form("e+ * a*b^3")
    assert x == SphereForm(fp=AlgElem.monomial(mono("a", 1, 3, 0)))
    assert x.degrees() == {1}
    assert parse_form("e- ^ e+") == VOLUME.scale(-qpow(2))
    assert parse_form("e+ e-") == VOLUME
    assert parse_form("e+ * e+") == SphereForm()
    assert parse_form("e+*b^2 + e-*c^2") == E_PLUS.right_mul(normalize("bb")) + E_MINUS.right_mul(normalize("cc"))


def test_left_coefficients_commute_past_basis():
    # b e+ = q e+ b
    assert parse_form("b^2 * e+") == parse_form("e+ * b^2").scale(qpow(2))


def test_grade_errors():
    with pytest.raises(GradeError):
        parse_form("e+ * a")
    with pytest.raises(GradeError):
        parse("a", "sphere")
    assert parse("e+ * a", "form", check_grades=False) == SphereForm(fp=gen("a"))
    assert parse("b*c", "sphere") == normalize("bc")


@pytest.mark.parametrize("text,pos", [("a +* b", 3), ("(a", 2), ("a ^ ", 4), ("3 $ 4", 2)])
def test_syntax_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as err:
        parse_alg(text)
    assert err.value.pos == pos
    assert "^" in str(err.value)


def test_unknown_names_are_context_dependent():
    with pytest.raises(ParseError):
        parse_scalar("a")
    with pytest.raises(ParseError):
        parse_alg("e+")
    with pytest.raises(ParseError):
        parse("dx1", "algebra")
    with pytest.raises(ValueError):
        parse("star(dx1)", "classical")


def test_scalar_grammar():
    assert parse_scalar("i*q/2") == I * q / 2
    assert parse_scalar("q^-3") == qpow(-3)
    assert parse_scalar("q^(-3)") == qpow(-3)
    assert parse_scalar("-(alpha + beta)") == -(sym("alpha") + sym("beta"))
    assert parse_scalar("2 q") == 2 * q


scal = st.builds(
    lambda re, im, k, den: (QScalar.gaussian(re, im) * qpow(k)) / (ONE + qpow(den)) if den else QScalar.gaussian(re, im) * qpow(k),
    st.integers(-5, 5), st.integers(-3, 3), st.integers(-4, 4), st.integers(0, 3),
)
monomial = st.builds(mono, st.sampled_from("ad"), st.integers(0, 4), st.integers(0, 4), st.integers(0, 4))


@given(st.lists(st.tuples(monomial, scal), max_size=4))
def test_algebra_round_trip(terms):
    x = AlgElem({})
    for m, c in terms:
        x = x + AlgElem.monomial(m, c)
    assert parse_alg(render_alg(x)) == x


grade0 = st.sampled_from(monomials_of_grade(0, 3))
grade_m2 = st.sampled_from(monomials_of_grade(-2, 3))
grade_p2 = st.sampled_from(monomials_of_grade(2, 3))


def _alg(pairs):
    x = AlgElem({})
    for m, c in pairs:
        x = x + AlgElem.monomial(m, c)
    return x


@given(
    st.lists(st.tuples(grade0, scal), max_size=2),
    st.lists(st.tuples(grade_m2, scal), max_size=2),
    st.lists(st.tuples(grade_p2, scal), max_size=2),
    st.lists(st.tuples(grade0, scal), max_size=2),
)
def test_form_round_trip(f0, fp, fm, g):
    x = SphereForm(f0=_alg(f0), fp=_alg(fp), fm=_alg(fm), g=_alg(g))
    assert parse_form(render_form(x)) == x


@given(scal, scal)
def test_scalar_round_trip(a, b):
    x = a * sym("alpha") - b
    assert parse_scalar(render_scalar(x)) == x


def test_seeded_round_trip_bulk():
    rng = random.Random(0)
    for _ in range(200):
        x = AlgElem({})
        for _ in range(rng.randint(0, 3)):
            m = mono(rng.choice("ad"), rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3))
            x = x + AlgElem.monomial(m, QScalar.gaussian(rng.randint(-3, 3), rng.randint(-1, 1)) * qpow(rng.randint(-2, 2)))
        assert parse_alg(render_alg(x)) == x
