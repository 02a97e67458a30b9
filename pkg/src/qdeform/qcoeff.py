"""Exact scalars: rational functions over the Gaussian rationals.

Every coefficient in the package is a :class:`QScalar`, an element of
``Q(i)(q, t, alpha, beta, ...)`` stored as ``(re + i*im) / den`` with
``re, im, den`` multivariate polynomials over Q.  All named variables are
treated as *real* transcendentals, so complex conjugation only flips the
sign of ``im``.

The canonical form (``den`` monic, no common factor of ``re``, ``im`` and
``den``) is restored after every operation, so ``==`` is structural.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Mapping, Union

import flint

# Order matters only for rendering and the monic normalisation.
SYMBOLS: tuple[str, ...] = (
    "q", "t", "alpha", "beta", "gamma", "eps", "s",
    "K", "L", "M", "N",
    "x", "y", "z", "x1", "x2", "x3", "x4",
)

_CTX = flint.fmpq_mpoly_ctx.get(SYMBOLS, "deglex")
_INDEX = {name: k for k, name in enumerate(SYMBOLS)}
_ZERO = _CTX.from_dict({})
_ONE = _CTX.from_dict({(0,) * len(SYMBOLS): 1})

Number = Union[int, Fraction, "QScalar"]


class ScalarError(ArithmeticError):
    pass


def _poly_const(c) -> flint.fmpq_mpoly:
    c = Fraction(c)
    if c == 0:
        return _ZERO
    return _CTX.from_dict({(0,) * len(SYMBOLS): flint.fmpq(c.numerator, c.denominator)})


def _frac(c) -> Fraction:
    c = flint.fmpq(c)
    return Fraction(int(c.p), int(c.q))


class QScalar:
    """Element of Q(i)(q, ...) in reduced form."""

    __slots__ = ("re", "im", "den", "_hash")

    def __init__(self, re=None, im=None, den=None, *, _canonical=False):
        self.re = _ZERO if re is None else re
        self.im = _ZERO if im is None else im
        self.den = _ONE if den is None else den
        self._hash = None
        if not _canonical:
            self._normalize()

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, value) -> "QScalar":
        if isinstance(value, QScalar):
            return value
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact")
        return cls(_poly_const(value), _ZERO, _ONE, _canonical=True)

    @classmethod
    def gaussian(cls, re, im) -> "QScalar":
        return cls(_poly_const(re), _poly_const(im), _ONE, _canonical=True)

    @classmethod
    def symbol(cls, name: str) -> "QScalar":
        try:
            k = _INDEX[name]
        except KeyError:
            raise ScalarError(f"unknown symbol {name!r}; available: {', '.join(SYMBOLS)}") from None
        exps = [0] * len(SYMBOLS)
        exps[k] = 1
        return cls(_CTX.from_dict({tuple(exps): 1}), _ZERO, _ONE, _canonical=True)

    @classmethod
    def monomial(cls, coeff, **powers: int) -> "QScalar":
        """``coeff * prod(name**k)``; negative powers allowed."""
        num = [0] * len(SYMBOLS)
        den = [0] * len(SYMBOLS)
        for name, k in powers.items():
            if k >= 0:
                num[_INDEX[name]] += k
            else:
                den[_INDEX[name]] -= k
        c = Fraction(coeff)
        if c == 0:
            return ZERO
        re = _CTX.from_dict({tuple(num): flint.fmpq(c.numerator, c.denominator)})
        return cls(re, _ZERO, _CTX.from_dict({tuple(den): 1}), _canonical=True)

    def _normalize(self) -> None:
        den = self.den
        if den.is_zero():
            raise ZeroDivisionError("QScalar with zero denominator")
        re, im = self.re, self.im
        if re.is_zero() and im.is_zero():
            self.re, self.im, self.den = _ZERO, _ZERO, _ONE
            return
        if not den.is_constant():
            g = den.gcd(re) if not re.is_zero() else den
            if not im.is_zero() and not g.is_one():
                g = g.gcd(im)
            if not g.is_one() and not g.is_constant():
                re = re / g
                im = im / g
                den = den / g
        lc = den.leading_coefficient()
        if lc != 1:
            inv = 1 / lc
            re, im, den = re * inv, im * inv, den * inv
        self.re, self.im, self.den = re, im, den

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_one(self) -> bool:
        return self.im.is_zero() and self.den.is_one() and self.re.is_one()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def is_imaginary(self) -> bool:
        """True for ``i * (real)``; zero counts as imaginary."""
        return self.re.is_zero()

    def is_constant(self) -> bool:
        return self.re.is_constant() and self.im.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def free_symbols(self) -> set[str]:
        used = set()
        for p in (self.re, self.im, self.den):
            for exps in p.monoms():
                used.update(SYMBOLS[k] for k, e in enumerate(exps) if e)
        return used

    # -- arithmetic ---------------------------------------------------
    @staticmethod
    def _coerce(other) -> "QScalar":
        if isinstance(other, QScalar):
            return other
        if isinstance(other, (int, Rational)):
            return QScalar.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return QScalar(self.re + other.re, self.im + other.im, self.den)
        d1, d2 = self.den, other.den
        if d1.is_one():
            return QScalar(self.re * d2 + other.re, self.im * d2 + other.im, d2)
        if d2.is_one():
            return QScalar(self.re + other.re * d1, self.im + other.im * d1, d1)
        g = d1.gcd(d2)
        a1, a2 = d2 / g, d1 / g
        return QScalar(self.re * a1 + other.re * a2, self.im * a1 + other.im * a2, d1 * a1)

    __radd__ = __add__

    def __neg__(self):
        return QScalar(-self.re, -self.im, self.den, _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return ZERO
        if other.is_one():
            return self
        if self.is_one():
            return other
        if self.im.is_zero() and other.im.is_zero():
            re, im = self.re * other.re, _ZERO
        else:
            re = self.re * other.re - self.im * other.im
            im = self.re * other.im + self.im * other.re
        den = self.den * other.den
        if den.is_one():
            return QScalar(re, im, den, _canonical=True)
        return QScalar(re, im, den)

    __rmul__ = __mul__

    def inverse(self) -> "QScalar":
        if self.is_zero():
            raise ZeroDivisionError("division by zero QScalar")
        if self.im.is_zero():
            return QScalar(self.den, _ZERO, self.re)
        # (re + i im)^-1 = (re - i im) / (re^2 + im^2), real denominator
        norm = self.re * self.re + self.im * self.im
        return QScalar(self.re * self.den, -self.im * self.den, norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if self.im.is_zero():
            return QScalar(self.re ** k, _ZERO, self.den ** k, _canonical=True)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "QScalar":
        """Complex conjugate; every symbol is real."""
        if self.im.is_zero():
            return self
        return QScalar(self.re, -self.im, self.den, _canonical=True)

    def real_part(self) -> "QScalar":
        return QScalar(self.re, _ZERO, self.den)

    def imag_part(self) -> "QScalar":
        return QScalar(self.im, _ZERO, self.den)

    # -- calculus and evaluation -------------------------------------
    def diff(self, name: str) -> "QScalar":
        k = _INDEX[name]
        re, im, den = self.re, self.im, self.den
        dden = den.derivative(k)
        if dden.is_zero():
            return QScalar(re.derivative(k), im.derivative(k), den)
        return QScalar(
            re.derivative(k) * den - re * dden,
            im.derivative(k) * den - im * dden,
            den * den,
        )

    def subs(self, values: Mapping[str, Number]) -> "QScalar":
        """Substitute exact values (rationals or QScalars) for symbols."""
        result = self
        for name, value in values.items():
            value = QScalar._coerce(value)
            if name not in result.free_symbols():
                continue
            result = _compose(result, name, value)
        return result

    def as_fraction(self) -> Fraction:
        if not (self.is_constant() and self.is_real()):
            raise ScalarError(f"{self} is not a rational constant")
        return _frac(self.re.leading_coefficient() if not self.re.is_zero() else 0) / _frac(
            self.den.leading_coefficient()
        )

    def as_gaussian(self) -> tuple[Fraction, Fraction]:
        if not self.is_constant():
            raise ScalarError(f"{self} is not constant")
        d = _frac(self.den.leading_coefficient())
        re = _frac(self.re.leading_coefficient()) if not self.re.is_zero() else Fraction(0)
        im = _frac(self.im.leading_coefficient()) if not self.im.is_zero() else Fraction(0)
        return re / d, im / d

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im and self.den == other.den

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.re), str(self.im), str(self.den)))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"QScalar({render_scalar(self)!r})"

    def __str__(self):
        return render_scalar(self)


def _compose(x: QScalar, name: str, value: QScalar) -> QScalar:
    # substitute polynomials separately, then rebuild the fraction
    k = _INDEX[name]

    def sub_poly(p) -> QScalar:
        out = ZERO
        for exps, c in p.terms():
            e = int(exps[k])
            rest = list(exps)
            rest[k] = 0
            term = QScalar(_CTX.from_dict({tuple(rest): c}), _ZERO, _ONE, _canonical=True)
            out = out + term * value ** e
        return out

    num = sub_poly(x.re) + sub_poly(x.im) * I
    den = sub_poly(x.den)
    if den.is_zero():
        raise ScalarError(f"substitution {name}={value} hits a pole of {x}")
    return num / den


ZERO = QScalar(_ZERO, _ZERO, _ONE, _canonical=True)
ONE = QScalar(_ONE, _ZERO, _ONE, _canonical=True)
I = QScalar(_ZERO, _ONE, _ONE, _canonical=True)
q = QScalar.symbol("q")


def sym(name: str) -> QScalar:
    return QScalar.symbol(name)


def as_scalar(value) -> QScalar:
    if isinstance(value, QScalar):
        return value
    if isinstance(value, str):
        from .parsing import parse_scalar

        return parse_scalar(value)
    return QScalar.const(value)


def qpow(k: int) -> QScalar:
    return _qpow(k)


@lru_cache(maxsize=None)
def _qpow(k: int) -> QScalar:
    return QScalar.monomial(1, q=k)


def substitute_q(x: QScalar, value) -> QScalar:
    return x.subs({"q": value})


# -- q-integers ------------------------------------------------------

@lru_cache(maxsize=None)
def qint(n: int) -> QScalar:
    """``[n] = 1 + q^2 + ... + q^(2(n-1))``; negative ``n`` is not allowed."""
    if n < 0:
        raise ValueError(f"q-integer index must be nonnegative, got {n}")
    exps = {}
    for k in range(n):
        e = [0] * len(SYMBOLS)
        e[0] = 2 * k
        exps[tuple(e)] = 1
    return QScalar(_CTX.from_dict(exps), _ZERO, _ONE, _canonical=True)


@lru_cache(maxsize=None)
def qfactorial(n: int) -> QScalar:
    out = ONE
    for k in range(1, n + 1):
        out = out * qint(k)
    return out


@lru_cache(maxsize=None)
def qbinom(p: int, r: int) -> QScalar:
    """Gaussian binomial in ``q^2``; always a polynomial."""
    if not 0 <= r <= p:
        raise ValueError(f"q-binomial needs 0 <= r <= p, got p={p}, r={r}")
    num = qfactorial(p).re
    den = qfactorial(r).re * qfactorial(p - r).re
    return QScalar(num / den, _ZERO, _ONE, _canonical=True)


def render_scalar(x: QScalar) -> str:
    num = _render_num(x.re, x.im)
    if x.den.is_one():
        return num
    den = _render_poly(x.den)
    if len(list(x.den.terms())) > 1 or "*" in den:
        den = f"({den})"
    if " " in num:
        num = f"({num})"
    return f"{num}/{den}"


def _render_num(re, im) -> str:
    if im.is_zero():
        return _render_poly(re)
    imag = _render_poly(im)
    imag = f"i*({imag})" if len(list(im.terms())) > 1 else (
        "i" if imag == "1" else "-i" if imag == "-1" else
        f"-i*{imag[1:]}" if imag.startswith("-") else f"i*{imag}"
    )
    if re.is_zero():
        return imag
    real = _render_poly(re)
    return f"{real} - {imag[1:]}" if imag.startswith("-") else f"{real} + {imag}"


def _render_poly(p) -> str:
    terms = list(p.terms())
    if not terms:
        return "0"
    out = []
    for k, (exps, c) in enumerate(terms):
        c = _frac(c)
        factors = []
        for name, e in zip(SYMBOLS, exps):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)
