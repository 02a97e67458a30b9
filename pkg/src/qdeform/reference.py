"""Closed-form expressions on monomials, transcribed independently of the
structural operators in qforms/laplace so that the two can be compared.

Each function takes exponents and returns a SphereForm (or AlgElem).  Terms
whose exponents would go negative are dropped; ``_t`` insists that such terms
carry a vanishing coefficient, so a misread display shows up as an error
rather than being silently truncated.
"""

from __future__ import annotations

from .laplace import MetricParams
from .qcoeff import ONE, QScalar, qint, qpow
from .qforms import SphereForm
from .qsl2 import A, D, ZERO_ALG, AlgElem, QMonomial


class ReferenceError_(ArithmeticError):
    pass


def _t(coeff: QScalar, fam: int, n: int, m: int, p: int) -> AlgElem:
    if min(n, m, p) < 0:
        if not coeff.is_zero():
            raise ReferenceError_(f"nonzero coefficient on negative exponent ({fam}, {n}, {m}, {p})")
        return ZERO_ALG
    if fam == D and n == 0:
        fam = A
    return AlgElem.monomial(QMonomial(fam, n, m, p), coeff)


q = qpow


def Q(n: int) -> QScalar:
    """q-integer, extended to negative n by (1 - q^2n)/(1 - q^2)."""
    return qint(n) if n >= 0 else -qpow(2 * n) * qint(-n)


def d_closed(fam: int, n: int, m: int, p: int) -> SphereForm:
    """d of a^n b^m c^p (fam A) or d^n b^m c^p (fam D)."""
    if n == 0:
        return SphereForm(
            fm=_t(Q(m) * q(-1), A, 1, m - 1, p),
            fp=_t(Q(p) * q(4 - 2 * p), D, 1, m, p - 1),
        )
    if fam == A:
        return SphereForm(
            fp=_t(Q(p + n) * q(3 - 2 * p - n), A, n - 1, m + 1, p)
            + _t(Q(p) * q(4 - 2 * p - n), A, n - 1, m, p - 1),
            fm=_t(Q(m) * q(-n - 1), A, n + 1, m - 1, p),
        )
    return SphereForm(
        fm=_t(Q(m + n) * q(-n), D, n - 1, m, p + 1) + _t(Q(m) * q(n - 1), D, n - 1, m - 1, p),
        fp=_t(Q(p) * q(4 - 2 * p + n), D, n + 1, m, p - 1),
    )


def delta1_closed(sign: str, fam: int, n: int, m: int, p: int, P: MetricParams) -> SphereForm:
    """delta(e^sign * monomial)."""
    al, be = P.alpha, P.beta
    if n == 0:
        if sign == "+":
            f = _t(al * Q(m) * q(-3), A, 1, m - 1, p)
        else:
            f = _t(be * Q(p) * q(6 - 2 * p), D, 1, m, p - 1)
    elif fam == A:
        if sign == "+":
            f = _t(al * Q(m) * q(-n - 3), A, n + 1, m - 1, p)
        else:
            f = _t(be * Q(p) * q(6 - 2 * p - n), A, n - 1, m, p - 1) + _t(
                be * Q(p + n) * q(5 - 2 * p - n), A, n - 1, m + 1, p
            )
    else:
        if sign == "+":
            f = _t(al * Q(n + m) * q(-n - 2), D, n - 1, m, p + 1) + _t(
                al * Q(m) * q(n - 3), D, n - 1, m - 1, p
            )
        else:
            f = _t(be * Q(p) * q(6 - 2 * p + n), D, n + 1, m, p - 1)
    return SphereForm(f0=f)


def delta2_closed(fam: int, n: int, m: int, p: int, P: MetricParams) -> SphereForm:
    """delta(monomial e+^e-), coefficient written on the left."""
    al, be, ga, ep = P.alpha, P.beta, P.gamma, P.eps
    if n == 0:
        return SphereForm(
            fm=_t(al * q(-5) * ga * Q(m), A, 1, m - 1, p),
            fp=_t(-be * q(8 - 2 * p) * ep * Q(p), D, 1, m, p - 1),
        )
    if fam == A:
        return SphereForm(
            fm=_t(al * ga * Q(m) * q(-n - 5), A, n + 1, m - 1, p),
            fp=_t(-be * q(7 - 2 * p - n) * ep * Q(p + n), A, n - 1, m + 1, p)
            + _t(-be * q(7 - 2 * p - n) * ep * Q(p) * q(1), A, n - 1, m, p - 1),
        )
    return SphereForm(
        fm=_t(al * ga * Q(m + n) * q(-4 - n), D, n - 1, m, p + 1)
        + _t(al * ga * Q(m) * q(n - 5), D, n - 1, m - 1, p),
        fp=_t(-be * q(8 - 2 * p + n) * ep * Q(p), D, n + 1, m, p - 1),
    )


def laplace0_closed(fam: int, n: int, m: int, p: int, P: MetricParams) -> SphereForm:
    """Laplacian of a grade-zero monomial."""
    s = P.spectral_factor
    if n == 0:
        # displayed with b^p c^p; grade zero forces m = p here
        return SphereForm(
            f0=_t(Q(p) * q(3 - 2 * p) * s * Q(p + 1), A, 0, p, p)
            + _t(Q(p) * q(3 - 2 * p) * s * q(1) * Q(p), A, 0, p - 1, p - 1)
        )
    if fam == A:
        k = Q(m) * q(3 - 2 * m) * s
        return SphereForm(f0=_t(k * Q(m + 1), A, n, m, p) + _t(k * q(1) * Q(p), A, n, m - 1, p - 1))
    k = Q(p) * q(3 - 2 * p) * s
    return SphereForm(f0=_t(k * Q(p + 1), D, n, m, p) + _t(k * Q(m) * q(2 * n + 1), D, n, m - 1, p - 1))


def laplace2_closed(fam: int, n: int, m: int, p: int, P: MetricParams) -> SphereForm:
    """Laplacian of (grade-zero monomial) e+^e-."""
    s = P.beta * P.eps + P.alpha * P.gamma * q(-8)
    if n == 0:
        k = Q(p) * q(7 - 2 * p) * s
        return SphereForm(g=_t(k * Q(p + 1), A, 0, m, p) + _t(k * Q(p) * q(1), A, 0, m - 1, p - 1))
    if fam == A:
        k = Q(m) * q(7 - 2 * m) * s
        return SphereForm(g=_t(k * Q(m + 1), A, n, m, p) + _t(k * Q(p) * q(1), A, n, m - 1, p - 1))
    k = Q(p) * q(7 - 2 * p) * s
    return SphereForm(g=_t(k * Q(p + 1), D, n, m, p) + _t(k * Q(m) * q(2 * n + 1), D, n, m - 1, p - 1))


def _lead(h: AlgElem, form: SphereForm, literal_left: bool) -> SphereForm:
    # h written in front of e^s: either a true left factor or notation for
    # the right coefficient e^s h (...)
    return form.left_mul(h) if literal_left else SphereForm(
        fp=h * form.fp, fm=h * form.fm
    )


def laplace1_closed(sign: str, fam: int, n: int, m: int, p: int, P: MetricParams,
                    literal_left: bool = False) -> SphereForm:
    """Laplacian of e^sign * monomial for symbolic gamma, eps.

    Two terms are displayed as ``a^(n-2) e+ (...)`` and ``d^(n-2) e- (...)``.
    By default the power is read as part of the right coefficient, like
    every other term; ``literal_left=True`` commutes it across e^s instead.
    """
    al, be, ga, ep = P.alpha, P.beta, P.gamma, P.eps
    plus_fac = be * ep + al * q(-6)      # beta eps + alpha q^-6
    minus_fac = be + al * ga * q(-4)     # beta + alpha gamma q^-4
    kill_g = ONE - ga * q(-2)            # 1 - gamma q^-2
    kill_e = ONE - ep * q(4)             # 1 - eps q^4
    if sign == "+" and fam == A:  # n = 0 included
        k = plus_fac * Q(m) * q(5 - 2 * p - 2 * n)
        return SphereForm(
            fp=_t(k * Q(n + p + 1), A, n, m, p) + _t(k * q(1) * Q(p), A, n, m - 1, p - 1),
            fm=_t(al * Q(m) * Q(m - 1) * q(-2 * n - 5) * kill_g, A, n + 2, m - 2, p),
        )
    if sign == "-" and n == 0:
        return SphereForm(
            fp=_t(be * Q(p) * Q(p - 1) * q(13 - 4 * p) * kill_e, D, 2, m, p - 2),
            fm=_t(Q(p) * q(5 - 2 * p) * minus_fac * Q(m + 1), A, 0, m, p)
            + _t(Q(p) * q(5 - 2 * p) * minus_fac * Q(m) * q(1), A, 0, m - 1, p - 1),
        )
    if sign == "-" and fam == A and n == 1:
        return SphereForm(
            fp=_t(be * Q(p) * kill_e * Q(p + 1) * q(8 - 4 * p), D, 1, m + 1, p - 1)
            + _t(be * Q(p) * kill_e * Q(p - 1) * q(11 - 4 * p), D, 1, m, p - 2),
            fm=_t(q(3 - 2 * p) * minus_fac * Q(p + 1) * Q(m + 1), A, 1, m, p)
            + _t(q(3 - 2 * p) * minus_fac * Q(p) * Q(m) * q(1), A, 1, m - 1, p - 1),
        )
    if sign == "-" and fam == A:
        # a^(n-2) e+ ( ... ): left coefficient a^(n-2)
        inner = (
            _t(Q(p + n) * Q(p + n - 1) * q(9 - 4 * p - 2 * n), A, 0, m + 2, p)
            + _t(Q(p) * Q(p - 1) * q(13 - 4 * p - 2 * n), A, 0, m, p - 2)
            + _t(Q(p) * Q(p + n - 1) * (ONE + q(2)) * q(10 - 4 * p - 2 * n), A, 0, m + 1, p - 1)
        )
        lead = _lead(_t(ONE, A, n - 2, 0, 0), SphereForm(fp=inner), literal_left).scale(be * kill_e)
        k = q(5 - 2 * p - 2 * n) * minus_fac
        return lead + SphereForm(
            fm=_t(k * Q(m + 2) * Q(m + 1), A, n, m, p) + _t(k * Q(p) * Q(m) * q(1), A, n, m - 1, p - 1)
        )
    if sign == "+" and n == 1:
        k = q(5 - 2 * p) * plus_fac
        return SphereForm(
            fp=_t(k * Q(m + 1) * Q(p + 1), D, 1, m, p) + _t(k * Q(m) * Q(p) * q(3), D, 1, m - 1, p - 1),
            fm=_t(al * Q(m) * kill_g * q(-3) * Q(m + 1) * q(-1), A, 1, m - 1, p + 1)
            + _t(al * Q(m) * kill_g * q(-3) * Q(m - 1), A, 1, m - 2, p),
        )
    if sign == "+":
        k = q(5 - 2 * p) * plus_fac
        inner = (
            _t(Q(n + m) * Q(n + m - 1) * q(-1 - 2 * n), A, 0, m, p + 2)
            + _t(Q(m) * Q(m - 1) * q(2 * n - 5), A, 0, m - 2, p)
            + _t(Q(m) * q(-2) * (ONE + q(-2)) * Q(m + n - 1), A, 0, m - 1, p + 1)
        )
        lead = _lead(_t(ONE, D, n - 2, 0, 0), SphereForm(fm=inner), literal_left).scale(al * kill_g)
        return lead + SphereForm(
            fp=_t(k * Q(n + m) * Q(p + 1), D, n, m, p) + _t(k * Q(m) * Q(p) * q(2 * n + 1), D, n, m - 1, p - 1)
        )
    # sign == "-", fam == D
    k = Q(p) * q(5 - 2 * p) * minus_fac
    return SphereForm(
        fp=_t(be * Q(p) * Q(p - 1) * q(13 - 4 * p + 2 * n) * kill_e, D, n + 2, m, p - 2),
        fm=_t(k * Q(m + n + 1), D, n, m, p) + _t(k * Q(m) * q(2 * n + 1), D, n, m - 1, p - 1),
    )


def laplace1_simplified(sign: str, fam: int, n: int, m: int, p: int, P: MetricParams) -> SphereForm:
    """Laplacian of e^sign * monomial at gamma = q^2, eps = q^-4 (alpha, beta from P)."""
    s = P.beta + P.alpha * q(-2)
    if sign == "+" and fam == A:
        k = s * Q(m) * q(1 - 2 * p - 2 * n)
        return SphereForm(fp=_t(k * Q(n + p + 1), A, n, m, p) + _t(k * q(1) * Q(p), A, n, m - 1, p - 1))
    if sign == "-" and n == 0:
        k = Q(p) * q(5 - 2 * p) * s
        return SphereForm(fm=_t(k * Q(m + 1), A, 0, m, p) + _t(k * Q(m) * q(1), A, 0, m - 1, p - 1))
    if sign == "-" and fam == A and n == 1:
        # this line keeps gamma in the display; here gamma = q^2
        k = q(3 - 2 * p) * (P.beta + P.alpha * q(2) * q(-4))
        return SphereForm(fm=_t(k * Q(p + 1) * Q(m + 1), A, 1, m, p) + _t(k * Q(p) * Q(m) * q(1), A, 1, m - 1, p - 1))
    if sign == "-" and fam == A:
        k = q(5 - 2 * p - 2 * n) * s
        return SphereForm(fm=_t(k * Q(m + 2) * Q(m + 1), A, n, m, p) + _t(k * Q(p) * Q(m) * q(1), A, n, m - 1, p - 1))
    if sign == "+" and n == 1:
        k = q(1 - 2 * p) * s
        return SphereForm(fp=_t(k * Q(m + 1) * Q(p + 1), D, 1, m, p) + _t(k * Q(m) * Q(p) * q(3), D, 1, m - 1, p - 1))
    if sign == "+":
        k = q(1 - 2 * p) * s
        return SphereForm(fp=_t(k * Q(n + m) * Q(p + 1), D, n, m, p) + _t(k * Q(m) * Q(p) * q(2 * n + 1), D, n, m - 1, p - 1))
    k = Q(p) * q(5 - 2 * p) * s
    return SphereForm(fm=_t(k * Q(m + n + 1), D, n, m, p) + _t(k * Q(m) * q(2 * n + 1), D, n, m - 1, p - 1))


def integral_closed(p: int) -> QScalar:
    """Integral of (bc)^p."""
    return (-q(1)) ** p / Q(p + 1)
