"""The homotopy delta, the Laplacian and its eigenforms on the Podles sphere.

``delta`` contracts the covariant derivative with the metric
``alpha v+ (x) v- + beta v- (x) v+``: the first vector acts on the form leg
and the second on the direction leg, so that

    delta(x) = alpha * (v+ -| leg(e-)) + beta * (v- -| leg(e+))

where ``nabla x = e+ (x) leg(e+) + e- (x) leg(e-)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .linalg import nullspace
from .qcoeff import ZERO, QScalar, as_scalar, qbinom, qint, qpow, sym
from .qforms import (
    MINUS,
    PLUS,
    V_MINUS,
    V_PLUS,
    SphereForm,
    d,
    interior,
    monomial_forms,
    nabla,
)
from .qsl2 import A, D, AlgElem, QMonomial


@dataclass(frozen=True)
class MetricParams:
    alpha: QScalar = field(default_factory=lambda: sym("alpha"))
    beta: QScalar = field(default_factory=lambda: sym("beta"))
    gamma: QScalar = field(default_factory=lambda: sym("gamma"))
    eps: QScalar = field(default_factory=lambda: sym("eps"))

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "eps"):
            object.__setattr__(self, name, as_scalar(getattr(self, name)))

    @classmethod
    def hodge_values(cls, alpha=None, beta=None) -> "MetricParams":
        """gamma = q^2, eps = q^-4 with alpha, beta left free unless given."""
        return cls(
            alpha=sym("alpha") if alpha is None else alpha,
            beta=sym("beta") if beta is None else beta,
            gamma=qpow(2),
            eps=qpow(-4),
        )

    @property
    def spectral_factor(self) -> QScalar:
        """beta + alpha q^-2, the common factor of all eigenvalues."""
        return self.beta + self.alpha * qpow(-2)

    def with_(self, **kw) -> "MetricParams":
        return replace(self, **kw)


def delta(x: SphereForm, params: MetricParams) -> SphereForm:
    """Degree -1 homotopy; zero on 0-forms."""
    x = x.component(1) + x.component(2)
    if x.is_zero():
        return SphereForm()
    t = nabla(x)
    out = SphereForm()
    leg_m, leg_p = t.leg(MINUS), t.leg(PLUS)
    if not leg_m.is_zero():
        out = out + interior(V_PLUS, leg_m, params.gamma, params.eps).scale(params.alpha)
    if not leg_p.is_zero():
        out = out + interior(V_MINUS, leg_p, params.gamma, params.eps).scale(params.beta)
    return out


def laplacian(x: SphereForm, params: MetricParams) -> SphereForm:
    return delta(d(x), params) + d(delta(x, params))


def heat_step_residual(x: SphereForm, params: MetricParams) -> SphereForm:
    """Right-hand side -alpha * Laplacian(x) of the heat equation."""
    return laplacian(x, params).scale(-params.alpha)


# -- eigenforms ---------------------------------------------------------------

class Family(str, Enum):
    F0_A = "0-a"          # a^n b^n sum(...)
    F0_D = "0-d"          # d^n c^n sum(...)
    F0_X = "0-x"          # sum(...) in x = bc only
    F1_PLUS_A = "1-plus-a"    # e+ a^n b^(n+2) sum
    F1_MINUS_A = "1-minus-a"  # e- a^n b^(n-2) sum, n >= 2
    F1_PLUS_D = "1-plus-d"    # e+ d^n c^(n-2) sum, n >= 2
    F1_MINUS_D = "1-minus-d"  # e- d^n c^(n+2) sum
    F1_PLUS_B2 = "1-plus-b2"  # e+ b^2 sum
    F1_MINUS_C2 = "1-minus-c2"  # e- c^2 sum
    F1_PLUS_DB = "1-plus-db"  # e+ d b sum
    F1_MINUS_AC = "1-minus-ac"  # e- a c sum
    F2_A = "2-a"
    F2_D = "2-d"
    F2_X = "2-x"

    @property
    def degree(self) -> int:
        return int(self.value[0])

    @property
    def needs_n(self) -> bool:
        return self in _N_MIN


_N_MIN = {
    Family.F0_A: 1,
    Family.F0_D: 1,
    Family.F1_PLUS_A: 0,
    Family.F1_MINUS_A: 2,
    Family.F1_PLUS_D: 2,
    Family.F1_MINUS_D: 0,
    Family.F2_A: 1,
    Family.F2_D: 1,
}

ONE_FORM_FAMILIES = [f for f in Family if f.degree == 1]


@dataclass(frozen=True)
class EigenForm:
    form: SphereForm
    eigenvalue: QScalar
    family: Family
    indices: tuple[int, int]


def _x_sum(lead: QMonomial, k: int, weight) -> AlgElem:
    """sum_{r<=k} weight(r) * lead * (bc)^r, with b, c appended to the lead."""
    terms = {}
    fam, n, m, p = lead
    for r in range(k + 1):
        w = weight(r)
        if not w.is_zero():
            terms[QMonomial(fam, n, m + r, p + r)] = w
    return AlgElem(terms)


def _check_index(name, value, minimum):
    if value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")


def eigenform(family: Family | str, n: int = 0, p: int = 0,
              params: MetricParams | None = None) -> EigenForm:
    """Closed-form eigenform of the Laplacian and its eigenvalue.

    ``p`` is the length of the x = bc sum (named m in some families); ``n``
    is ignored by the families without a free a/d power.  0-form families use
    any metric; 1- and 2-form families are eigenforms for gamma = q^2,
    eps = q^-4.
    """
    family = Family(family)
    params = params or MetricParams()
    _check_index("p", p, 0)
    if family in _N_MIN:
        _check_index("n", n, _N_MIN[family])
    else:
        n = 0
    s = params.spectral_factor
    B, qi, q = qbinom, qint, qpow

    if family in (Family.F0_A, Family.F2_A):
        coeff = _x_sum(QMonomial(A, n, n, 0), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(2 * n + p + r, n + r))
        lam = s * qi(n + p + 1) * qi(n + p) * q(3 - 2 * n - 2 * p)
    elif family in (Family.F0_D, Family.F2_D):
        coeff = _x_sum(QMonomial(D, n, 0, n), p,
                       lambda r: q((p - r) * (2 * n + p - r)) * B(p, r) * B(2 * n + p + r, n + r))
        lam = s * qi(n + p + 1) * qi(n + p) * q(3 - 2 * n - 2 * p)
    elif family in (Family.F0_X, Family.F2_X):
        coeff = _x_sum(QMonomial(A, 0, 0, 0), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(p + r, r))
        lam = s * qi(p + 1) * qi(p) * q(3 - 2 * p)
    elif family is Family.F1_PLUS_A:
        coeff = _x_sum(QMonomial(A, n, n + 2, 0), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(2 * n + p + r + 2, n + r + 2))
        lam = s * qi(n + p + 2) * qi(n + p + 1) * q(1 - 2 * n - 2 * p)
    elif family is Family.F1_MINUS_A:
        coeff = _x_sum(QMonomial(A, n, n - 2, 0), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(2 * n + p + r - 2, n + r - 2))
        lam = s * qi(n + p) * qi(n + p - 1) * q(5 - 2 * n - 2 * p)
    elif family is Family.F1_PLUS_D:
        coeff = _x_sum(QMonomial(D, n, 0, n - 2), p,
                       lambda r: q((p - r) * (2 * n + p - r)) * B(p, r) * B(2 * n + p + r - 2, n + r - 2))
        lam = s * qi(n + p) * qi(n + p - 1) * q(5 - 2 * n - 2 * p)
    elif family is Family.F1_MINUS_D:
        lead = QMonomial(D, n, 0, n + 2) if n else QMonomial(A, 0, 0, 2)
        coeff = _x_sum(lead, p,
                       lambda r: q((p - r) * (2 * n + p - r)) * B(p, r) * B(2 * n + p + r + 2, n + r + 2))
        lam = s * qi(p + n + 2) * qi(p + n + 1) * q(5 - 2 * p - 2 * n)
    elif family is Family.F1_PLUS_B2:
        coeff = _x_sum(QMonomial(A, 0, 2, 0), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(p + r + 2, r + 2))
        lam = s * qi(p + 2) * qi(p + 1) * q(1 - 2 * p)
    elif family is Family.F1_MINUS_C2:
        coeff = _x_sum(QMonomial(A, 0, 0, 2), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(p + r + 2, r + 2))
        lam = s * qi(p + 2) * qi(p + 1) * q(1 - 2 * p)
    elif family is Family.F1_PLUS_DB:
        coeff = _x_sum(QMonomial(D, 1, 1, 0), p,
                       lambda r: q((p - r) * (2 + p - r)) * B(p, r) * B(p + r + 2, r + 1))
        lam = s * qi(p + 2) * qi(p + 1) * q(1 - 2 * p)
    elif family is Family.F1_MINUS_AC:
        coeff = _x_sum(QMonomial(A, 1, 0, 1), p,
                       lambda r: q((p - r) ** 2) * B(p, r) * B(p + r + 2, r + 1))
        lam = s * qi(p + 2) * qi(p + 1) * q(1 - 2 * p)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(family)

    if family.degree == 0:
        form = SphereForm(f0=coeff)
    elif family.degree == 2:
        form = SphereForm(g=coeff)
    elif family.value.startswith("1-plus"):
        form = SphereForm(fp=coeff)
    else:
        form = SphereForm(fm=coeff)
    return EigenForm(form.validate(), lam, family, (n, p))


def verify_eigen(ef: EigenForm, params: MetricParams) -> tuple[bool, SphereForm]:
    residual = laplacian(ef.form, params) - ef.form.scale(ef.eigenvalue)
    return residual.is_zero(), residual


def observed_eigenvalue(form: SphereForm, params: MetricParams) -> QScalar | None:
    """lambda with Laplacian(form) = lambda * form, or None if form is not an eigenform."""
    lap = laplacian(form, params)
    for slot, coeff in form.parts():
        if coeff:
            m, c = next(iter(coeff.terms.items()))
            lam = getattr(lap, slot).coeff(m) / c
            return lam if lap == form.scale(lam) else None
    return None


def eigen_instances(family: Family, bound: int):
    """Index pairs (n, p) with both <= bound that are valid for ``family``."""
    ns = range(_N_MIN.get(family, 0), bound + 1) if family in _N_MIN else [0]
    return [(n, p) for n in ns for p in range(bound + 1)]


# -- harmonic forms -------------------------------------------------------------

def _flatten(x: SphereForm) -> dict:
    out = {}
    for slot, coeff in x.parts():
        for m, c in coeff.terms.items():
            out[(slot, m)] = c
    return out


def harmonic_kernel(degree: int, bound: int, params: MetricParams | None = None) -> list[SphereForm]:
    """Basis of ker(Laplacian) inside the span of monomial forms with exponents <= bound."""
    params = params or MetricParams.hodge_values()
    basis = monomial_forms(degree, bound)
    columns = [_flatten(laplacian(f, params)) for f in basis]
    out = []
    for vec in nullspace(columns):
        form = SphereForm()
        for c, f in zip(vec, basis):
            if not c.is_zero():
                form = form + f.scale(c)
        out.append(form)
    return out


def laplacian_matrix_columns(degree: int, bound: int, params: MetricParams):
    basis = monomial_forms(degree, bound)
    return basis, [_flatten(laplacian(f, params)) for f in basis]


__all__ = [
    "MetricParams",
    "delta",
    "laplacian",
    "heat_step_residual",
    "Family",
    "EigenForm",
    "eigenform",
    "verify_eigen",
    "observed_eigenvalue",
    "eigen_instances",
    "harmonic_kernel",
    "ONE_FORM_FAMILIES",
    "ZERO",
]
