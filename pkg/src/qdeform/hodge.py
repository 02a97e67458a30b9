"""Antilinear Hodge operator, integral and inner product on the Podles sphere.

    hodge(e+ f)     = K e- f*
    hodge(e- f)     = M e+ f*
    hodge(e+^e- f)  = -q^-2 L f*
    hodge(f)        = N e+^e- f*

Scalars are conjugated, so hodge(i x) = -i hodge(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .laplace import MetricParams, delta
from .qcoeff import I, ONE, ZERO, QScalar, as_scalar, qint, qpow, substitute_q, sym
from .qforms import SphereForm, d, monomial_forms, wedge
from .qsl2 import AlgElem, GradeError, star


@dataclass(frozen=True)
class HodgeConstants:
    K: QScalar
    L: QScalar
    M: QScalar
    N: QScalar
    alpha: QScalar | None = None
    beta: QScalar | None = None
    gamma: QScalar | None = None
    eps: QScalar | None = None

    def __post_init__(self):
        for name in ("K", "L", "M", "N", "alpha", "beta", "gamma", "eps"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, as_scalar(v))

    def metric(self) -> MetricParams:
        missing = [n for n in ("alpha", "beta", "gamma", "eps") if getattr(self, n) is None]
        if missing:
            raise ValueError(f"metric constants not set: {', '.join(missing)}")
        return MetricParams(self.alpha, self.beta, self.gamma, self.eps)

    def all_imaginary(self) -> bool:
        return all(x.is_imaginary() for x in (self.K, self.L, self.M, self.N))

    def satisfies_double_condition(self) -> bool:
        return self.K * self.M == ONE and self.L * self.N == qpow(2)

    def codifferential_relations(self) -> dict[str, QScalar]:
        """Residuals of the four relations tying alpha, beta to K, L, M, N, gamma, eps."""
        q5, q3, q9 = qpow(5), qpow(-3), qpow(-9)
        return {
            "alpha - K q^5 / N": self.alpha - self.K * q5 / self.N,
            "alpha - L q^5 / (gamma M)": self.alpha - self.L * q5 / (self.gamma * self.M),
            "beta + M q^-3 / N": self.beta + self.M * q3 / self.N,
            "beta + L q^-9 / (eps K)": self.beta + self.L * q9 / (self.eps * self.K),
        }


def solve_constants(K, L) -> HodgeConstants:
    """Constants making hodge an involution up to sign and delta its codifferential."""
    K, L = as_scalar(K), as_scalar(L)
    for name, v in (("K", K), ("L", L)):
        if v.is_zero():
            raise ValueError(f"{name} must be nonzero")
        if not v.is_imaginary():
            raise ValueError(f"{name} must be purely imaginary, got {v}")
    return HodgeConstants(
        K=K,
        L=L,
        M=ONE / K,
        N=qpow(2) / L,
        alpha=K * L * qpow(3),
        beta=-(L / K) * qpow(-5),
        gamma=qpow(2),
        eps=qpow(-4),
    )


def hodge(x: SphereForm, c: HodgeConstants) -> SphereForm:
    return SphereForm(
        f0=star(x.g).scale(-qpow(-2) * c.L),
        fp=star(x.fm).scale(c.M),
        fm=star(x.fp).scale(c.K),
        g=star(x.f0).scale(c.N),
    )


def hodge_inverse(y: SphereForm, c: HodgeConstants) -> SphereForm:
    """Solve hodge(x) = y directly from the four defining lines."""
    # x.g: -q^-2 L star(x.g) = y.f0  =>  x.g = star(y.f0 / (-q^-2 L))
    def undo(coeff: AlgElem, k: QScalar) -> AlgElem:
        return star(coeff.scale(ONE / k))

    return SphereForm(
        f0=undo(y.g, c.N),
        fp=undo(y.fm, c.K),
        fm=undo(y.fp, c.M),
        g=undo(y.f0, -qpow(-2) * c.L),
    )


def integral0(f: AlgElem) -> QScalar:
    """Integral of a grade-zero element: (bc)^p -> (-q)^p / [p+1], zero if a or d occurs."""
    total = ZERO
    for m, coeff in f.terms.items():
        if m.grade != 0:
            raise GradeError(f"integral is defined on grade-zero elements, got {m}")
        if m.n == 0:
            total = total + coeff * (-qpow(1)) ** m.p / qint(m.p + 1)
    return total


def integrate(x: SphereForm, volume=ONE) -> QScalar:
    """Integral of a 2-form e+^e- h, equal to integral0(h) / volume."""
    if x.f0 or x.fp or x.fm:
        raise ValueError("only 2-forms can be integrated")
    return integral0(x.g) / as_scalar(volume)


def inner(eta: SphereForm, xi: SphereForm, c: HodgeConstants, volume=None) -> QScalar:
    """Integral of eta ^ hodge(xi), with top forms normalized so that integral(hodge(1)) = 1.

    ``volume`` overrides that normalization (``volume=1`` pairs e+^e- to 1).
    """
    de, dx = eta.degrees(), xi.degrees()
    if len(de) > 1 or len(dx) > 1 or (de and dx and de != dx):
        raise ValueError(f"inner product needs equal, single degrees; got {sorted(de)} and {sorted(dx)}")
    vol = c.N if volume is None else volume
    top = wedge(eta, hodge(xi, c))
    return integrate(top.component(2), vol)


def codifferential(x: SphereForm, c: HodgeConstants) -> SphereForm:
    """(-1)^r hodge^-1 d hodge on each degree r."""
    out = SphereForm()
    for r in (1, 2):
        part = x.component(r)
        if part:
            out = out + hodge_inverse(d(hodge(part, c)), c).scale((-1) ** r)
    return out


def double_hodge_residuals(c: HodgeConstants, bound: int) -> list[tuple[SphereForm, SphereForm]]:
    out = []
    for k in (0, 1, 2):
        sign = (-1) ** (k * (2 - k))
        for eta in monomial_forms(k, bound):
            res = hodge(hodge(eta, c), c) - eta.scale(sign)
            if not res.is_zero():
                out.append((eta, res))
    return out


def check_double_hodge(c: HodgeConstants, bound: int) -> bool:
    return not double_hodge_residuals(c, bound)


def codifferential_residuals(c: HodgeConstants, params: MetricParams, bound: int):
    """(xi, residual) for which (-1)^n hodge(delta xi) != d(hodge xi)."""
    out = []
    for n in (0, 1, 2):
        for xi in monomial_forms(n, bound):
            res = hodge(delta(xi, params), c).scale((-1) ** n) - d(hodge(xi, c))
            if not res.is_zero():
                out.append((xi, res))
    return out


def check_codifferential(c: HodgeConstants, params: MetricParams | None, bound: int) -> bool:
    params = params or c.metric()
    return not codifferential_residuals(c, params, bound)


def hermitian_defects(c: HodgeConstants, bound: int, volume=None):
    """Pairs (eta, xi) with <eta, xi>^* != <xi, eta>."""
    out = []
    for k in (0, 1, 2):
        forms = monomial_forms(k, bound)
        for i, eta in enumerate(forms):
            for xi in forms[i:]:
                lhs = inner(eta, xi, c, volume).conj()
                rhs = inner(xi, eta, c, volume)
                if lhs != rhs:
                    out.append((eta, xi))
    return out


def positivity_probe(c: HodgeConstants, bound: int, q_value=Fraction(1, 2)):
    """Numeric signs of <xi, xi> on monomial forms at q = q_value; nothing is asserted."""
    rows = []
    for k in (0, 1, 2):
        for xi in monomial_forms(k, bound):
            val = inner(xi, xi, c)
            try:
                re, im = substitute_q(val, q_value).as_gaussian()
            except (ValueError, ArithmeticError):
                rows.append((k, str(xi), None, None))
                continue
            rows.append((k, str(xi), float(re), float(im)))
    return rows


def symbolic_imaginary_constants() -> HodgeConstants:
    """K, L, M, N = i times the real symbols K, L, M, N."""
    return HodgeConstants(*(I * sym(n) for n in ("K", "L", "M", "N")))


def double_hodge_factorization(bound: int) -> list[tuple[SphereForm, str]]:
    """Check both directions of the double-Hodge condition with symbolic imaginary constants.

    For every monomial k-form eta, hodge(hodge(eta)) - (-1)^(k(2-k)) eta must equal
    u * cond * eta with u a nonzero constant, cond = KM - 1 on 1-forms and
    LN - q^2 on 0- and 2-forms.  Then the identity holds on eta exactly when
    cond vanishes.  Returns the monomials where this factorization fails.
    """
    c = symbolic_imaginary_constants()
    conds = {0: c.L * c.N - qpow(2), 1: c.K * c.M - ONE, 2: c.L * c.N - qpow(2)}
    bad = []
    for k in (0, 1, 2):
        sign = (-1) ** (k * (2 - k))
        for eta in monomial_forms(k, bound):
            res = hodge(hodge(eta, c), c) - eta.scale(sign)
            ratio = _form_ratio(res, eta)
            if ratio is None:
                bad.append((eta, "residual is not a multiple of eta"))
                continue
            u = ratio / conds[k]
            if u.is_zero() or u.free_symbols() & {"K", "L", "M", "N"}:
                bad.append((eta, f"residual factor {ratio} is not a unit times {conds[k]}"))
    return bad


def _form_ratio(x: SphereForm, y: SphereForm) -> QScalar | None:
    """The scalar u with x = u y, or None."""
    for (_, a), (_, b) in zip(x.parts(), y.parts()):
        for m, cb in b.terms.items():
            u = a.coeff(m) / cb
            return u if x == y.scale(u) else None
    return None
