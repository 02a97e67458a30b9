"""Differential forms on the standard Podles sphere.

A form is stored as

    f0 + e+ * fp + e- * fm + e+^e- * g

with every coefficient to the right of the basis forms.  Left coefficients
are moved across with ``h e^s = q^(-grade h) e^s h``.  Intermediate results
(for instance ``d`` applied to a single generator) may leave the grade-zero
subspace, so validation is a separate step rather than a constructor
invariant; the parser and public constructors validate by default.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import faults
from .qcoeff import ONE, ZERO, QScalar, as_scalar, qpow
from .qsl2 import (
    ONE_ALG,
    ZERO_ALG,
    AlgElem,
    GradeError,
    QMonomial,
    _times_gen,
    homogeneous_grade,
    multiply,
)

PLUS, MINUS = "+", "-"
# required grade of each coefficient slot for a form of total grade zero
SLOT_GRADE = {"f0": 0, "fp": -2, "fm": 2, "g": 0}
SLOT_LABEL = {"f0": "1", "fp": "e+", "fm": "e-", "g": "e+^e-"}


def split_by_grade(x: AlgElem) -> dict[int, AlgElem]:
    parts: dict[int, dict] = {}
    for m, c in x.terms.items():
        parts.setdefault(m.grade, {})[m] = c
    return {g: AlgElem._raw(t) for g, t in parts.items()}


def commute(sign: str, f: AlgElem) -> tuple[AlgElem, QScalar]:
    """Return ``(f, k)`` with ``e^sign f = k f e^sign``; ``k = q^grade(f)``."""
    if sign not in (PLUS, MINUS):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    g = homogeneous_grade(f)
    return f, qpow(g)


def left_to_right(h: AlgElem, nbasis: int) -> dict[int, AlgElem]:
    """Pieces of ``h`` with the factor picked up moving past ``nbasis`` e's."""
    return {g: part.scale(qpow(-nbasis * g)) for g, part in split_by_grade(h).items()}


class SphereForm:
    """Element of the exterior algebra over S^2_q (possibly mixed degree)."""

    __slots__ = ("f0", "fp", "fm", "g")

    def __init__(self, f0=ZERO_ALG, fp=ZERO_ALG, fm=ZERO_ALG, g=ZERO_ALG, *, check=False):
        self.f0 = _alg(f0)
        self.fp = _alg(fp)
        self.fm = _alg(fm)
        self.g = _alg(g)
        if check:
            self.validate()

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero_form(cls, f, check=True):
        return cls(f0=f, check=check)

    @classmethod
    def one_form(cls, fp=ZERO_ALG, fm=ZERO_ALG, check=True):
        return cls(fp=fp, fm=fm, check=check)

    @classmethod
    def two_form(cls, g, check=True):
        return cls(g=g, check=check)

    @classmethod
    def one_form_left(cls, fp=ZERO_ALG, fm=ZERO_ALG, check=True):
        """Build ``fp e+ + fm e-`` given left coefficients."""
        fp, fm = _alg(fp), _alg(fm)
        right_p = sum(left_to_right(fp, 1).values(), ZERO_ALG)
        right_m = sum(left_to_right(fm, 1).values(), ZERO_ALG)
        return cls(fp=right_p, fm=right_m, check=check)

    # -- structure ----------------------------------------------------------
    def parts(self):
        return (("f0", self.f0), ("fp", self.fp), ("fm", self.fm), ("g", self.g))

    def degrees(self) -> set[int]:
        out = set()
        if self.f0:
            out.add(0)
        if self.fp or self.fm:
            out.add(1)
        if self.g:
            out.add(2)
        return out

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous form; ``None`` for zero or mixed forms."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def component(self, k: int) -> "SphereForm":
        if k == 0:
            return SphereForm(f0=self.f0)
        if k == 1:
            return SphereForm(fp=self.fp, fm=self.fm)
        if k == 2:
            return SphereForm(g=self.g)
        return ZERO_FORM

    def grade_violations(self) -> list[str]:
        bad = []
        for slot, x in self.parts():
            want = SLOT_GRADE[slot]
            for m in x.terms:
                if m.grade != want:
                    bad.append(
                        f"{SLOT_LABEL[slot]} coefficient must have grade {want:+d}, "
                        f"got {m.grade:+d} (monomial {m})"
                    )
        return bad

    def is_valid(self) -> bool:
        return not self.grade_violations()

    def validate(self) -> "SphereForm":
        bad = self.grade_violations()
        if bad:
            raise GradeError("; ".join(bad))
        return self

    def is_zero(self) -> bool:
        return not (self.f0 or self.fp or self.fm or self.g)

    __bool__ = lambda self: not self.is_zero()

    # -- linear structure -------------------------------------------------
    def _zip(self, other, op):
        return SphereForm(*(op(x, y) for (_, x), (_, y) in zip(self.parts(), other.parts())))

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self._zip(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self._zip(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SphereForm(-self.f0, -self.fp, -self.fm, -self.g)

    def scale(self, c) -> "SphereForm":
        c = as_scalar(c)
        return SphereForm(self.f0.scale(c), self.fp.scale(c), self.fm.scale(c), self.g.scale(c))

    def map_coeffs(self, fn) -> "SphereForm":
        return SphereForm(*(x.map_coeffs(fn) for _, x in self.parts()))

    def right_mul(self, h: AlgElem) -> "SphereForm":
        return SphereForm(self.f0 * h, self.fp * h, self.fm * h, self.g * h)

    def left_mul(self, h: AlgElem) -> "SphereForm":
        out = SphereForm(f0=h * self.f0)
        for gr, part in split_by_grade(h).items():
            k1 = qpow(-gr)
            out = out + SphereForm(
                fp=(part * self.fp).scale(k1),
                fm=(part * self.fm).scale(k1),
                g=(part * self.g).scale(qpow(-2 * gr)),
            )
        return out

    def __mul__(self, other):
        if isinstance(other, SphereForm):
            return wedge(self, other)
        if isinstance(other, AlgElem):
            return self.right_mul(other)
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, AlgElem):
            return self.left_mul(other)
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return all(x == y for (_, x), (_, y) in zip(self.parts(), other.parts()))

    def __hash__(self):
        return hash(tuple(x for _, x in self.parts()))

    def __repr__(self):
        from .parsing import render_form

        return f"SphereForm({render_form(self)!r})"

    def __str__(self):
        from .parsing import render_form

        return render_form(self)

    def to_json(self) -> dict:
        from .parsing import render_alg_terms

        comps = {}
        for slot, x in self.parts():
            if x:
                comps[SLOT_LABEL[slot]] = render_alg_terms(x)
        return {"degree": self.degree, "components": comps}


def _alg(x) -> AlgElem:
    if isinstance(x, AlgElem):
        return x
    return AlgElem.scalar(as_scalar(x))


def _lift(x):
    if isinstance(x, SphereForm):
        return x
    if isinstance(x, AlgElem):
        return SphereForm(f0=x)
    if isinstance(x, (int, QScalar)) or hasattr(x, "denominator"):
        return SphereForm(f0=AlgElem.scalar(x))
    return NotImplemented


ZERO_FORM = SphereForm()
ONE_FORM = SphereForm(f0=ONE_ALG)
E_PLUS = SphereForm(fp=ONE_ALG)
E_MINUS = SphereForm(fm=ONE_ALG)
VOLUME = SphereForm(g=ONE_ALG)


# -- wedge ------------------------------------------------------------------

def _basis_terms(x: SphereForm):
    """Yield (basis, coefficient) with basis in (), (+,), (-,), (+,-)."""
    if x.f0:
        yield (), x.f0
    if x.fp:
        yield (PLUS,), x.fp
    if x.fm:
        yield (MINUS,), x.fm
    if x.g:
        yield (PLUS, MINUS), x.g


def _basis_product(b1: tuple, b2: tuple) -> tuple[tuple, QScalar] | None:
    if not b1:
        return b2, ONE
    if not b2:
        return b1, ONE
    if len(b1) + len(b2) > 2 or b1 == b2:
        return None
    if b1 == (PLUS,):
        return (PLUS, MINUS), ONE
    # e- ^ e+ = -q^2 e+ ^ e-
    return (PLUS, MINUS), -qpow(2)


def _from_basis(basis: tuple, coeff: AlgElem) -> SphereForm:
    if basis == ():
        return SphereForm(f0=coeff)
    if basis == (PLUS,):
        return SphereForm(fp=coeff)
    if basis == (MINUS,):
        return SphereForm(fm=coeff)
    return SphereForm(g=coeff)


def wedge(x: SphereForm, y: SphereForm) -> SphereForm:
    """Graded product; anything above degree two vanishes."""
    out = ZERO_FORM
    for b1, f in _basis_terms(x):
        for b2, h in _basis_terms(y):
            prod = _basis_product(b1, b2)
            if prod is None:
                continue
            basis, k = prod
            # e^b1 f e^b2 h = q^(-len(b2) grade f) e^b1 e^b2 f h
            for gr, part in split_by_grade(f).items():
                c = (part * h).scale(k * qpow(-len(b2) * gr))
                out = out + _from_basis(basis, c)
    return out


# -- the exterior derivative ------------------------------------------------

# dX written as e^s * coefficient (right form)
_D_GEN = {
    "a": (PLUS, QMonomial(0, 0, 1, 0), 2),   # da = q b e+ = q^2 e+ b
    "b": (MINUS, QMonomial(0, 1, 0, 0), -1),  # db = a e- = q^-1 e- a
    "c": (PLUS, QMonomial(1, 1, 0, 0), 2),   # dc = q d e+ = q^2 e+ d
    "d": (MINUS, QMonomial(0, 0, 0, 1), -1),  # dd = c e- = q^-1 e- c
}
if faults.active("dc-power"):
    _D_GEN["c"] = (PLUS, QMonomial(1, 1, 0, 0), 3)


def _prefix_mul(terms: dict, g: str) -> dict:
    out: dict = {}
    for m, c in terms.items():
        for m2, c2 in _times_gen(m, g):
            s = out.get(m2, ZERO) + c * c2
            if s.is_zero():
                out.pop(m2, None)
            else:
                out[m2] = s
    return out


@lru_cache(maxsize=100_000)
def _d_monomial(m: QMonomial) -> tuple[AlgElem, AlgElem]:
    """(plus, minus) right coefficients of d applied to one normal monomial."""
    word = m.word()
    plus, minus = ZERO_ALG, ZERO_ALG
    prefix = {QMonomial(0, 0, 0, 0): ONE}
    grade_prefix = 0
    for i, g in enumerate(word):
        sign, h, power = _D_GEN[g]
        # P (e^s q^k h) S = q^(k - grade P) e^s (P h S)
        suffix = word[i + 1:]
        coeff = AlgElem._raw(prefix) * AlgElem.monomial(h) * _word(suffix)
        coeff = coeff.scale(qpow(power - grade_prefix))
        if sign == PLUS:
            plus = plus + coeff
        else:
            minus = minus + coeff
        prefix = _prefix_mul(prefix, g)
        grade_prefix += 1 if g in "ac" else -1
    return plus, minus


@lru_cache(maxsize=10_000)
def _word_cached(word: tuple) -> AlgElem:
    from .qsl2 import normalize

    return normalize(word)


def _word(word) -> AlgElem:
    return _word_cached(tuple(word))


def d0(f: AlgElem) -> SphereForm:
    plus, minus = ZERO_ALG, ZERO_ALG
    for m, c in f.terms.items():
        p, mi = _d_monomial(m)
        plus = plus + p.scale(c)
        minus = minus + mi.scale(c)
    return SphereForm(fp=plus, fm=minus)


def d(x: SphereForm) -> SphereForm:
    """Exterior derivative, with d e+ = d e- = 0."""
    out = d0(x.f0)
    if x.fp or x.fm:
        # d(e+ fp + e- fm) = -e+ ^ d fp - e- ^ d fm
        dp = d0(x.fp)
        dm = d0(x.fm)
        out = out - wedge(E_PLUS, dp) - wedge(E_MINUS, dm)
    return out


# -- vector fields and interior products -----------------------------------

@dataclass(frozen=True)
class VectorSymbol:
    sign: str

    def __post_init__(self):
        if self.sign not in (PLUS, MINUS):
            raise ValueError(f"vector sign must be '+' or '-', got {self.sign!r}")

    def evaluate(self, basis_sign: str) -> int:
        return 1 if basis_sign == self.sign else 0

    def __str__(self):
        return f"v{self.sign}"


V_PLUS = VectorSymbol(PLUS)
V_MINUS = VectorSymbol(MINUS)


def interior(v: VectorSymbol, x: SphereForm, gamma=None, eps=None) -> SphereForm:
    """Contract ``v`` into a 1- or 2-form.

    On 2-forms ``v+ -| e+^e- = gamma e-`` and ``v- -| e+^e- = -eps e+``; the
    default ``gamma``, ``eps`` are the free symbols of the same name.
    """
    if x.f0:
        raise ValueError("interior product is not defined on 0-forms")
    gamma = as_scalar("gamma" if gamma is None else gamma)
    eps = as_scalar("eps" if eps is None else eps)
    out = SphereForm(f0=x.fp if v.sign == PLUS else x.fm)
    if x.g:
        if v.sign == PLUS:
            out = out + SphereForm(fm=x.g.scale(gamma))
        else:
            out = out + SphereForm(fp=x.g.scale(-eps))
    return out


# -- covariant derivative -----------------------------------------------------

class Tensor:
    """Sum of ``e^r (x) omega_r``: a 1-form leg on the left, any form on the right.

    The coefficient of the left leg is always pushed into ``omega_r``.
    """

    __slots__ = ("legs",)

    def __init__(self, legs=None):
        self.legs: dict[str, SphereForm] = {
            r: w for r, w in (legs or {}).items() if not w.is_zero()
        }

    @classmethod
    def pair(cls, x: SphereForm, y: SphereForm) -> "Tensor":
        """x (x) y for a 1-form ``x``."""
        if x.f0 or x.g:
            raise ValueError("left tensor leg must be a 1-form")
        return cls({PLUS: y.left_mul(x.fp), MINUS: y.left_mul(x.fm)})

    def leg(self, r: str) -> SphereForm:
        return self.legs.get(r, ZERO_FORM)

    def __add__(self, other: "Tensor") -> "Tensor":
        keys = set(self.legs) | set(other.legs)
        return Tensor({r: self.leg(r) + other.leg(r) for r in keys})

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + other.scale(-1)

    def scale(self, c) -> "Tensor":
        return Tensor({r: w.scale(c) for r, w in self.legs.items()})

    def left_mul(self, h: AlgElem) -> "Tensor":
        out = Tensor()
        for gr, part in split_by_grade(h).items():
            k = qpow(-gr)
            out = out + Tensor({r: w.left_mul(part).scale(k) for r, w in self.legs.items()})
        return out

    def is_zero(self) -> bool:
        return not self.legs

    def __eq__(self, other):
        return isinstance(other, Tensor) and self.legs == other.legs

    def __hash__(self):
        return hash(tuple(sorted(self.legs.items())))

    def grade_violations(self) -> list[str]:
        out = []
        for r, w in self.legs.items():
            out += [f"leg e{r}: {msg}" for msg in _shift_violations(w, r)]
        return out

    def __str__(self):
        if not self.legs:
            return "0"
        return " + ".join(f"e{r} (x) ({w})" for r, w in sorted(self.legs.items()))

    __repr__ = __str__


def _shift_violations(w: SphereForm, r: str) -> list[str]:
    # e^r (x) w has total grade zero iff w has total grade -(grade of e^r)
    shift = 2 if r == PLUS else -2
    bad = []
    for slot, x in w.parts():
        want = SLOT_GRADE[slot] - shift
        for m in x.terms:
            if m.grade != want:
                bad.append(f"{SLOT_LABEL[slot]} coefficient grade {m.grade:+d}, expected {want:+d}")
    return bad


def nabla(x: SphereForm) -> Tensor:
    """Covariant derivative with nabla e+ = nabla e- = 0.

    Defined on 1-forms and, by the same rule with nabla(e+^e-) = 0, on 2-forms.
    """
    if x.f0:
        raise ValueError("nabla is taken on 1- and 2-forms only")
    out = Tensor()
    for basis, f in ((E_PLUS, x.fp), (E_MINUS, x.fm), (VOLUME, x.g)):
        nb = 2 if basis is VOLUME else 1
        # e^B f = q^(nb grade f) f e^B, and nabla(f e^B) = df (x) e^B
        for gr, part in split_by_grade(f).items():
            out = out + Tensor.pair(d0(part), basis).scale(qpow(nb * gr))
    return out


def nabla_formula(x: SphereForm) -> Tensor:
    """Reference expression q^-2 d fp (x) e+ + q^2 d fm (x) e- for valid 1-forms."""
    if x.f0 or x.g:
        raise ValueError("reference formula covers 1-forms only")
    return Tensor.pair(d0(x.fp), E_PLUS).scale(qpow(-2)) + Tensor.pair(d0(x.fm), E_MINUS).scale(qpow(2))


def monomial_forms(degree: int, bound: int) -> list[SphereForm]:
    """Grade-valid forms e^B * monomial with exponents <= bound."""
    from .qsl2 import monomials_of_grade

    if degree == 0:
        return [SphereForm(f0=AlgElem.monomial(m)) for m in monomials_of_grade(0, bound)]
    if degree == 1:
        return [SphereForm(fp=AlgElem.monomial(m)) for m in monomials_of_grade(-2, bound)] + [
            SphereForm(fm=AlgElem.monomial(m)) for m in monomials_of_grade(2, bound)
        ]
    if degree == 2:
        return [SphereForm(g=AlgElem.monomial(m)) for m in monomials_of_grade(0, bound)]
    raise ValueError(f"degree must be 0, 1 or 2, got {degree}")
