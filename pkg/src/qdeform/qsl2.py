"""C_q[SL2] in normal form.

Elements are finite combinations of ``a^n b^m c^p`` (family A) and
``d^n b^m c^p`` with ``n >= 1`` (family D).  Products are computed by
right-multiplying a normal monomial by one generator at a time, using the
closed forms obtained from

    ba = q ab,  ca = q ac,  db = q bd,  dc = q cd,  cb = bc,
    ad = 1 + q^-1 bc,  da = 1 + q bc.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator, NamedTuple

from .qcoeff import ONE, ZERO, QScalar, as_scalar, qpow

A, D = 0, 1
GENERATORS = ("a", "b", "c", "d")


class QMonomial(NamedTuple):
    family: int
    n: int
    m: int
    p: int

    @property
    def grade(self) -> int:
        sign = 1 if self.family == A else -1
        return sign * self.n - self.m + self.p

    def word(self) -> tuple[str, ...]:
        lead = "a" if self.family == A else "d"
        return (lead,) * self.n + ("b",) * self.m + ("c",) * self.p

    def __str__(self) -> str:
        parts = []
        lead = "a" if self.family == A else "d"
        for name, k in ((lead, self.n), ("b", self.m), ("c", self.p)):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts) if parts else "1"


def mono(family: int | str, n: int = 0, m: int = 0, p: int = 0) -> QMonomial:
    if isinstance(family, str):
        family = {"a": A, "A": A, "d": D, "D": D}[family]
    if min(n, m, p) < 0:
        raise ValueError(f"negative exponent in monomial ({n}, {m}, {p})")
    if family == D and n == 0:
        family = A
    return QMonomial(family, n, m, p)


UNIT = QMonomial(A, 0, 0, 0)


class GradeError(ValueError):
    """Raised when an element fails a grade requirement."""


class AlgElem:
    """Immutable element of C_q[SL2]; ``terms`` maps monomials to nonzero scalars."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for k, v in (terms.items() if isinstance(terms, dict) else terms):
                v = as_scalar(v)
                if not v.is_zero():
                    clean[k] = v
        self.terms: dict[QMonomial, QScalar] = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "AlgElem":
        obj = cls.__new__(cls)
        obj.terms = dict(sorted(terms.items()))
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, m: QMonomial, coeff=ONE) -> "AlgElem":
        coeff = as_scalar(coeff)
        return cls._raw({m: coeff}) if not coeff.is_zero() else ZERO_ALG

    @classmethod
    def scalar(cls, c) -> "AlgElem":
        return cls.monomial(UNIT, c)

    # -- linear structure --------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, ZERO) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return AlgElem._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return AlgElem._raw({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgElem":
        c = as_scalar(c)
        if c.is_zero():
            return ZERO_ALG
        if c.is_one():
            return self
        return AlgElem._raw({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return multiply(self, other)
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, QScalar)) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = ONE_ALG
        for _ in range(k):
            out = out * self
        return out

    # -- queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.terms.items()))
        return self._hash

    def __iter__(self) -> Iterator[tuple[QMonomial, QScalar]]:
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, m: QMonomial) -> QScalar:
        return self.terms.get(m, ZERO)

    def map_coeffs(self, fn) -> "AlgElem":
        return AlgElem({k: fn(v) for k, v in self.terms.items()})

    def grades(self) -> set[int]:
        return {m.grade for m in self.terms}

    def __repr__(self):
        from .parsing import render_alg

        return f"AlgElem({render_alg(self)!r})"

    def __str__(self):
        from .parsing import render_alg

        return render_alg(self)


def _coerce(x):
    if isinstance(x, AlgElem):
        return x
    if isinstance(x, (int, QScalar)) or hasattr(x, "denominator"):
        return AlgElem.scalar(x)
    return NotImplemented


ZERO_ALG = AlgElem._raw({})
ONE_ALG = AlgElem._raw({UNIT: ONE})


def gen(name: str) -> AlgElem:
    return AlgElem.monomial(_GEN_MONO[name])


_GEN_MONO = {
    "a": QMonomial(A, 1, 0, 0),
    "b": QMonomial(A, 0, 1, 0),
    "c": QMonomial(A, 0, 0, 1),
    "d": QMonomial(D, 1, 0, 0),
}


# -- rewriting ---------------------------------------------------------

@lru_cache(maxsize=None)
def _times_gen(m: QMonomial, g: str) -> tuple[tuple[QMonomial, QScalar], ...]:
    """Normal form of ``m * g`` for a single generator ``g``."""
    fam, n, mb, pc = m
    if g == "b":
        return ((QMonomial(fam, n, mb + 1, pc), ONE),)
    if g == "c":
        return ((QMonomial(fam, n, mb, pc + 1), ONE),)
    if g == "a":
        # b^m c^p a = q^(m+p) a b^m c^p
        k = qpow(mb + pc)
        if fam == A:
            return ((QMonomial(A, n + 1, mb, pc), k),)
        # d^n a = d^(n-1) (1 + q bc)
        return (
            (mono(D, n - 1, mb, pc), k),
            (mono(D, n - 1, mb + 1, pc + 1), k * qpow(1)),
        )
    if g == "d":
        k = qpow(-mb - pc)
        if fam == D or n == 0:
            return ((QMonomial(D, n + 1, mb, pc), k),)
        # a^n d = a^(n-1) (1 + q^-1 bc)
        return (
            (QMonomial(A, n - 1, mb, pc), k),
            (QMonomial(A, n - 1, mb + 1, pc + 1), k * qpow(-1)),
        )
    raise ValueError(f"unknown generator {g!r}")


def _times_word(terms: dict, word: Iterable[str]) -> dict:
    for g in word:
        out: dict = {}
        for m, c in terms.items():
            for m2, c2 in _times_gen(m, g):
                s = out.get(m2, ZERO) + c * c2
                if s.is_zero():
                    out.pop(m2, None)
                else:
                    out[m2] = s
        terms = out
    return terms


@lru_cache(maxsize=200_000)
def _mono_mul(m1: QMonomial, m2: QMonomial) -> tuple[tuple[QMonomial, QScalar], ...]:
    if m2 == UNIT:
        return ((m1, ONE),)
    if m1 == UNIT:
        return ((m2, ONE),)
    return tuple(_times_word({m1: ONE}, m2.word()).items())


def normalize(word: Iterable[str]) -> AlgElem:
    """Normal form of a product of generators, e.g. ``normalize("da")``."""
    word = list(word)
    for g in word:
        if g not in GENERATORS:
            raise ValueError(f"unknown generator {g!r}")
    return AlgElem._raw(_times_word({UNIT: ONE}, word))


def multiply(x: AlgElem, y: AlgElem) -> AlgElem:
    if not x.terms or not y.terms:
        return ZERO_ALG
    out: dict = {}
    for m1, c1 in x.terms.items():
        for m2, c2 in y.terms.items():
            c12 = c1 * c2
            for m, c in _mono_mul(m1, m2):
                s = out.get(m, ZERO) + c12 * c
                if s.is_zero():
                    out.pop(m, None)
                else:
                    out[m] = s
    return AlgElem._raw(out)


# -- star, grading -------------------------------------------------------

@lru_cache(maxsize=None)
def _star_mono(m: QMonomial) -> tuple[QMonomial, QScalar]:
    fam, n, mb, pc = m
    sign = -1 if (mb + pc) % 2 else 1
    if fam == A:
        # (a^n b^m c^p)* = (-1)^(p+m) q^(-n(p+m)+p-m) d^n b^p c^m
        return mono(D, n, pc, mb), qpow(-n * (pc + mb) + pc - mb) * sign
    # (d^n b^p c^m)* = (-1)^(p+m) q^(n(p+m)-p+m) a^n b^m c^p, here b^mb c^pc
    return mono(A, n, pc, mb), qpow(n * (mb + pc) - mb + pc) * sign


def star(x: AlgElem) -> AlgElem:
    """Conjugate-linear anti-involution with a* = d, b* = -q^-1 c."""
    out: dict = {}
    for m, c in x.terms.items():
        m2, k = _star_mono(m)
        out[m2] = out.get(m2, ZERO) + c.conj() * k
    return AlgElem(out)


STAR_GENERATORS = {
    "a": ((QMonomial(D, 1, 0, 0), ONE),),
    "d": ((QMonomial(A, 1, 0, 0), ONE),),
    "b": ((QMonomial(A, 0, 0, 1), -qpow(-1)),),
    "c": ((QMonomial(A, 0, 1, 0), -qpow(1)),),
}


def star_by_generators(x: AlgElem) -> AlgElem:
    """Reference star: reverse each word and star generators one at a time."""
    out = ZERO_ALG
    for m, c in x.terms.items():
        acc = ONE_ALG
        for g in reversed(m.word()):
            acc = acc * AlgElem(dict(STAR_GENERATORS[g]))
        out = out + acc.scale(c.conj())
    return out


INHOMOGENEOUS = "inhomogeneous"


def grade(x: AlgElem) -> int | str:
    gs = x.grades()
    if not gs:
        return 0
    if len(gs) > 1:
        return INHOMOGENEOUS
    return gs.pop()


def homogeneous_grade(x: AlgElem) -> int:
    g = grade(x)
    if g == INHOMOGENEOUS:
        raise GradeError(f"element {x} is not homogeneous")
    return g


def is_sphere(x: AlgElem) -> bool:
    return all(m.grade == 0 for m in x.terms)


def monomials_of_grade(g: int, bound: int) -> list[QMonomial]:
    """All normal monomials with exponents <= bound and the given grade."""
    out = []
    for n in range(bound + 1):
        for m in range(bound + 1):
            for p in range(bound + 1):
                for fam in (A, D) if n else (A,):
                    mo = QMonomial(fam, n, m, p)
                    if mo.grade == g:
                        out.append(mo)
    return sorted(out)
