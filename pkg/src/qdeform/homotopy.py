"""Time extension and homotopy deformation of a differential graded algebra.

An element of the extended complex is ``omega + rho ^ dt`` where omega and rho
are backend elements whose scalar coefficients may depend polynomially on the
symbol ``t``.  For omega of degree n and eta of degree m:

    d_s(omega)      = d omega + (-1)^n (d/dt omega + s Lap omega) ^ dt
    d_s(rho ^ dt)   = d rho ^ dt
    xi ^_s eta      = xi ^ eta
                      - (-1)^(n+m) s (delta(xi ^ eta) - delta xi ^ eta
                                      - (-1)^n xi ^ delta eta) ^ dt
    (rho ^ dt) ^_s eta = (-1)^m (rho ^ eta) ^ dt
    xi ^_s (sigma ^ dt) = (xi ^ sigma) ^ dt

with Lap = delta d + d delta.  ``s`` is the deformation parameter; the
backend's delta already carries any metric constants.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from .qcoeff import QScalar, as_scalar


class DGABackend(Protocol):
    name: str
    graded_commutative: bool

    def zero(self) -> Any: ...
    def components(self, x) -> dict[int, Any]: ...
    def d(self, x) -> Any: ...
    def wedge(self, x, y) -> Any: ...
    def delta(self, x) -> Any: ...
    def dt(self, x) -> Any: ...
    def random_element(self, rng: random.Random, degree: int) -> Any: ...


@dataclass(frozen=True)
class TimedElem:
    omega: Any
    rho: Any

    def __add__(self, other):
        return TimedElem(self.omega + other.omega, self.rho + other.rho)

    def __sub__(self, other):
        return TimedElem(self.omega - other.omega, self.rho - other.rho)

    def __neg__(self):
        return TimedElem(-self.omega, -self.rho)

    def scale(self, c) -> "TimedElem":
        c = as_scalar(c)
        return TimedElem(self.omega.scale(c), self.rho.scale(c))

    def is_zero(self) -> bool:
        return self.omega.is_zero() and self.rho.is_zero()

    def __eq__(self, other):
        return isinstance(other, TimedElem) and (self - other).is_zero()

    def __hash__(self):
        return hash((self.omega, self.rho))

    def degree(self, backend: DGABackend) -> int | None:
        degs = set(backend.components(self.omega))
        degs |= {k + 1 for k in backend.components(self.rho)}
        return degs.pop() if len(degs) == 1 else None

    def __str__(self):
        parts = []
        if not self.omega.is_zero():
            parts.append(str(self.omega))
        if not self.rho.is_zero():
            parts.append(f"({self.rho}) ^ dt")
        return " + ".join(parts) if parts else "0"


def timed(backend: DGABackend, omega=None, rho=None) -> TimedElem:
    z = backend.zero()
    return TimedElem(z if omega is None else omega, z if rho is None else rho)


def laplacian(backend: DGABackend, x):
    return backend.delta(backend.d(x)) + backend.d(backend.delta(x))


def d_alpha(x: TimedElem, alpha, backend: DGABackend) -> TimedElem:
    alpha = as_scalar(alpha)
    rho = backend.d(x.rho)
    for n, w in backend.components(x.omega).items():
        extra = backend.dt(w)
        if not alpha.is_zero():
            extra = extra + laplacian(backend, w).scale(alpha)
        rho = rho + extra.scale((-1) ** n)
    return TimedElem(backend.d(x.omega), rho)


def wedge_alpha(x: TimedElem, y: TimedElem, alpha, backend: DGABackend) -> TimedElem:
    alpha = as_scalar(alpha)
    B = backend
    omega = B.wedge(x.omega, y.omega)
    rho = B.zero()
    xs = B.components(x.omega)
    ys = B.components(y.omega)
    if not alpha.is_zero():
        for n, xi in xs.items():
            dxi = B.delta(xi)
            for m, eta in ys.items():
                defect = (
                    B.delta(B.wedge(xi, eta))
                    - B.wedge(dxi, eta)
                    - B.wedge(xi, B.delta(eta)).scale((-1) ** n)
                )
                rho = rho - defect.scale(alpha * (-1) ** (n + m))
    for m, eta in ys.items():
        rho = rho + B.wedge(x.rho, eta).scale((-1) ** m)
    rho = rho + B.wedge(x.omega, y.rho)
    return TimedElem(omega, rho)


def iso(x: TimedElem, alpha, backend: DGABackend) -> TimedElem:
    """I(xi) = xi - (-1)^n alpha delta(xi) ^ dt; identity on the dt part."""
    alpha = as_scalar(alpha)
    rho = x.rho
    for n, w in backend.components(x.omega).items():
        rho = rho - backend.delta(w).scale(alpha * (-1) ** n)
    return TimedElem(x.omega, rho)


def iso_inv(x: TimedElem, alpha, backend: DGABackend) -> TimedElem:
    return iso(x, -as_scalar(alpha), backend)


# -- closedness ---------------------------------------------------------------

@dataclass
class ClosednessReport:
    d_xi: Any
    dt_residual: Any
    witness_residual: Any | None
    closed: bool

    def as_dict(self) -> dict:
        out = {
            "closed": self.closed,
            "d_xi": str(self.d_xi),
            "dt_residual": str(self.dt_residual),
        }
        if self.witness_residual is not None:
            out["witness_residual"] = str(self.witness_residual)
        return out


def closedness_analysis(xi, a, alpha, backend: DGABackend, witness=None) -> ClosednessReport:
    """Test d_s(xi + a dt) = 0 for a 1-form xi and a function a.

    Returns d xi, d(a - s delta xi) - d/dt xi and, when xi = d(witness),
    d(a - s delta d witness - d/dt witness).
    """
    alpha = as_scalar(alpha)
    B = backend
    d_xi = B.d(xi)
    dt_res = B.d(a - B.delta(xi).scale(alpha)) - B.dt(xi)
    wres = None
    if witness is not None:
        wres = B.d(a - B.delta(B.d(witness)).scale(alpha) - B.dt(witness))
    full = d_alpha(TimedElem(xi, a), alpha, B)
    return ClosednessReport(d_xi, dt_res, wres, full.is_zero())


# -- axiom verification -------------------------------------------------------

@dataclass
class AxiomResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures


def random_timed(backend: DGABackend, rng: random.Random, degree: int) -> TimedElem:
    omega = backend.random_element(rng, degree)
    rho = backend.random_element(rng, degree - 1) if degree >= 1 else backend.zero()
    return TimedElem(omega, rho)


def _max_degree(backend) -> int:
    return getattr(backend, "max_degree", 2)


def axiom_suite(backend: DGABackend, alpha, samples: int = 100, seed: int = 0,
                checks: tuple[str, ...] | None = None) -> dict[str, AxiomResult]:
    """Sampled checks that (d_s, ^_s) is a DGA and that I is a DGA isomorphism."""
    alpha = as_scalar(alpha)
    rng = random.Random(seed)
    top = _max_degree(backend)
    names = checks or (
        "d_alpha^2 = 0",
        "Leibniz",
        "associativity",
        "I(x ^0 y) = I(x) ^a I(y)",
        "I(d0 x) = d_a I(x)",
        "I I^-1 = id",
        "graded commutativity",
    )
    res = {n: AxiomResult(n) for n in names}

    def record(name, ok, *witness):
        if name not in res:
            return
        r = res[name]
        r.checked += 1
        if not ok:
            r.failures.append(tuple(str(w) for w in witness))

    B = backend
    zero = 0
    for _ in range(samples):
        n = rng.randint(0, top)
        m = rng.randint(0, max(0, top - n))
        x = random_timed(B, rng, n)
        y = random_timed(B, rng, m)
        if "d_alpha^2 = 0" in res:
            record("d_alpha^2 = 0", d_alpha(d_alpha(x, alpha, B), alpha, B).is_zero(), x)
        if "Leibniz" in res:
            lhs = d_alpha(wedge_alpha(x, y, alpha, B), alpha, B)
            rhs = wedge_alpha(d_alpha(x, alpha, B), y, alpha, B) + wedge_alpha(
                x, d_alpha(y, alpha, B), alpha, B
            ).scale((-1) ** n)
            record("Leibniz", lhs == rhs, x, y)
        if "associativity" in res:
            k = rng.randint(0, max(0, top - n - m))
            z = random_timed(B, rng, k)
            lhs = wedge_alpha(wedge_alpha(x, y, alpha, B), z, alpha, B)
            rhs = wedge_alpha(x, wedge_alpha(y, z, alpha, B), alpha, B)
            record("associativity", lhs == rhs, x, y, z)
        if "I(x ^0 y) = I(x) ^a I(y)" in res:
            lhs = iso(wedge_alpha(x, y, zero, B), alpha, B)
            rhs = wedge_alpha(iso(x, alpha, B), iso(y, alpha, B), alpha, B)
            record("I(x ^0 y) = I(x) ^a I(y)", lhs == rhs, x, y)
        if "I(d0 x) = d_a I(x)" in res:
            lhs = iso(d_alpha(x, zero, B), alpha, B)
            rhs = d_alpha(iso(x, alpha, B), alpha, B)
            record("I(d0 x) = d_a I(x)", lhs == rhs, x)
        if "I I^-1 = id" in res:
            ok = iso(iso_inv(x, alpha, B), alpha, B) == x and iso_inv(iso(x, alpha, B), alpha, B) == x
            record("I I^-1 = id", ok, x)
        if "graded commutativity" in res and B.graded_commutative:
            lhs = wedge_alpha(x, y, alpha, B)
            rhs = wedge_alpha(y, x, alpha, B).scale((-1) ** (n * m))
            record("graded commutativity", lhs == rhs, x, y)
    if not B.graded_commutative:
        res.pop("graded commutativity", None)
    return res


# -- the sphere backend ----------------------------------------------------------

class SphereBackend:
    """Forms on the Podles sphere with delta from a fixed metric."""

    name = "sphere"
    graded_commutative = False
    max_degree = 2

    def __init__(self, params=None, coeff_sampler: Callable[[random.Random], QScalar] | None = None,
                 bound: int = 2):
        from .laplace import MetricParams

        self.params = params or MetricParams()
        self.bound = bound
        self.coeff_sampler = coeff_sampler or _default_sphere_coeff

    def zero(self):
        from .qforms import ZERO_FORM

        return ZERO_FORM

    def components(self, x):
        return {k: x.component(k) for k in sorted(x.degrees())}

    def d(self, x):
        from .qforms import d

        return d(x)

    def wedge(self, x, y):
        from .qforms import wedge

        return wedge(x, y)

    def delta(self, x):
        from .laplace import delta

        return delta(x, self.params)

    def dt(self, x):
        return x.map_coeffs(lambda c: c.diff("t"))

    def random_element(self, rng, degree):
        from .qforms import ZERO_FORM, monomial_forms

        if degree < 0 or degree > 2:
            return ZERO_FORM
        pool = _sphere_pool(degree, self.bound)
        out = ZERO_FORM
        for f in rng.sample(pool, k=min(2, len(pool))):
            out = out + f.scale(self.coeff_sampler(rng))
        return out


_POOLS: dict = {}


def _sphere_pool(degree, bound):
    from .qforms import monomial_forms

    key = (degree, bound)
    if key not in _POOLS:
        _POOLS[key] = monomial_forms(degree, bound)
    return _POOLS[key]


def _default_sphere_coeff(rng: random.Random) -> QScalar:
    from .qcoeff import QScalar as S

    c = S.const(rng.choice([1, -1, 2, -3]))
    k = rng.randint(0, 2)
    return c * S.symbol("t") ** k if k else c
