"""Exterior calculus on R^n with a metric, drift and the Ito/Stratonovich deformation.

Forms are stored as maps from sorted tuples of coordinate names to scalar
coefficients, so ``d`` never needs to know the dimension: it differentiates by
every coordinate symbol a coefficient actually contains.  Coefficients are
exact rational functions of the coordinates and of time ``t``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path

from .homotopy import TimedElem, d_alpha, iso, iso_inv, wedge_alpha
from .parsing import _SIMPLE, Domain, Parser, _coeff_prefix
from .qcoeff import ONE, ZERO, QScalar, as_scalar, render_scalar

COORDINATES = ("x", "y", "z", "x1", "x2", "x3", "x4")
_ORDER = {c: k for k, c in enumerate(COORDINATES)}
HALF = QScalar.const(Fraction(1, 2))


def _sort_key(idx):
    return (len(idx), [_ORDER[n] for n in idx])


def _sorted_sign(idx: tuple[str, ...]):
    """(sign, sorted tuple) for a wedge of basis 1-forms, or (0, None) on a repeat."""
    if len(set(idx)) < len(idx):
        return 0, None
    pos = [_ORDER[n] for n in idx]
    inv = sum(1 for a, b in combinations(range(len(pos)), 2) if pos[a] > pos[b])
    return (-1) ** inv, tuple(sorted(idx, key=_ORDER.__getitem__))


class CForm:
    """Differential form sum_I c_I dx^I with I a sorted tuple of coordinate names."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for k, c in (terms or {}).items():
            k = tuple(k)
            for n in k:
                if n not in _ORDER:
                    raise ValueError(f"unknown coordinate {n!r}")
            sign, key = _sorted_sign(k)
            if not sign:
                continue
            c = as_scalar(c) * sign
            clean[key] = clean.get(key, ZERO) + c
        self._set({k: c for k, c in clean.items() if not c.is_zero()})

    def _set(self, terms):
        self.terms = dict(sorted(terms.items(), key=lambda kv: _sort_key(kv[0])))
        self._hash = None

    @classmethod
    def _raw(cls, terms) -> "CForm":
        out = cls.__new__(cls)
        out._set({k: c for k, c in terms.items() if not c.is_zero()})
        return out

    @classmethod
    def function(cls, c) -> "CForm":
        return cls._raw({(): as_scalar(c)})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return CForm._raw(out)

    def __neg__(self):
        return CForm._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "CForm":
        c = as_scalar(c)
        if c.is_zero():
            return ZERO_CFORM
        return CForm._raw({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, CForm):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def map_coeffs(self, fn) -> "CForm":
        return CForm._raw({k: fn(c) for k, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, CForm):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((k, c) for k, c in self.terms.items()))
        return self._hash

    def degrees(self) -> set[int]:
        return {len(k) for k in self.terms}

    def component(self, k: int) -> "CForm":
        return CForm._raw({i: c for i, c in self.terms.items() if len(i) == k})

    def coeff(self, *names: str) -> QScalar:
        sign, key = _sorted_sign(tuple(names))
        if not sign:
            return ZERO
        return self.terms.get(key, ZERO) * sign

    def __repr__(self):
        return f"CForm({render_cform(self)})"

    def __str__(self):
        return render_cform(self)


ZERO_CFORM = CForm()
ONE_CFORM = CForm.function(ONE)


def dx(*names: str) -> CForm:
    return CForm({tuple(names): ONE})


def fn(c) -> CForm:
    return CForm.function(c)


def wedge(x: CForm, y: CForm) -> CForm:
    out: dict = {}
    for i, a in x.terms.items():
        for j, b in y.terms.items():
            sign, key = _sorted_sign(i + j)
            if sign:
                out[key] = out.get(key, ZERO) + a * b * sign
    return CForm._raw(out)


def _coords_in(c: QScalar):
    return [n for n in COORDINATES if n in c.free_symbols()]


def d(x: CForm) -> CForm:
    """Exterior derivative in the spatial coordinates; t is a parameter."""
    out: dict = {}
    for idx, c in x.terms.items():
        for n in _coords_in(c):
            if n in idx:
                continue
            sign, key = _sorted_sign((n,) + idx)
            out[key] = out.get(key, ZERO) + c.diff(n) * sign
    return CForm._raw(out)


def interior(name: str, x: CForm) -> CForm:
    """d/dx^name contracted into x: move dx^name to the front with its sign and drop it."""
    out = {}
    for idx, c in x.terms.items():
        if name in idx:
            p = idx.index(name)
            out[idx[:p] + idx[p + 1:]] = c * (-1) ** p
    return CForm._raw(out)


def time_derivative(x: CForm) -> CForm:
    return x.map_coeffs(lambda c: c.diff("t"))


# -- metric geometry ------------------------------------------------------------

def _matrix(rows, n):
    m = tuple(tuple(as_scalar(v) for v in row) for row in rows)
    if len(m) != n or any(len(r) != n for r in m):
        raise ValueError(f"expected a {n}x{n} matrix")
    return m


def _det(m) -> QScalar:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = ZERO
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = tuple(tuple(r[k] for k in range(n) if k != j) for r in m[1:])
        total = total + m[0][j] * _det(minor) * (-1) ** j
    return total


@dataclass(frozen=True)
class Metric:
    """g_{ij} together with its inverse g^{ij}; the product is checked exactly."""

    coords: tuple[str, ...]
    g: tuple
    g_inv: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(set(coords)) != len(coords) or any(c not in _ORDER for c in coords):
            raise ValueError(f"coordinates must be distinct names from {COORDINATES}")
        n = len(coords)
        g, gi = _matrix(self.g, n), _matrix(self.g_inv, n)
        for name, m in (("g", g), ("g_inv", gi)):
            for i in range(n):
                for j in range(i + 1, n):
                    if m[i][j] != m[j][i]:
                        raise ValueError(f"{name} is not symmetric at ({i}, {j})")
        for i in range(n):
            for j in range(n):
                s = sum((g[i][k] * gi[k][j] for k in range(n)), ZERO)
                if s != (ONE if i == j else ZERO):
                    raise ValueError(f"g * g_inv is not the identity at ({i}, {j}): {s}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", gi)

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def flat(cls, coords=("x1", "x2")) -> "Metric":
        n = len(coords)
        eye = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        return cls(tuple(coords), eye, eye)

    @classmethod
    def diagonal(cls, coords, entries) -> "Metric":
        entries = [as_scalar(e) for e in entries]
        n = len(coords)
        g = [[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)]
        gi = [[entries[i].inverse() if i == j else ZERO for j in range(n)] for i in range(n)]
        return cls(tuple(coords), g, gi)

    def is_flat_identity(self) -> bool:
        return all(self.g[i][j] == (ONE if i == j else ZERO) for i in range(self.n) for j in range(self.n))

    def det(self) -> QScalar:
        return _det(self.g)

    @cached_property
    def christoffel(self):
        """Gamma[k][nu][mu] = 1/2 g^{k l} (d_mu g_{nu l} + d_nu g_{l mu} - d_l g_{nu mu})."""
        n, X, g, gi = self.n, self.coords, self.g, self.g_inv
        dg = [[[g[a][b].diff(X[c]) for c in range(n)] for b in range(n)] for a in range(n)]
        out = []
        for k in range(n):
            rows = []
            for nu in range(n):
                row = []
                for mu in range(n):
                    s = ZERO
                    for lam in range(n):
                        if gi[k][lam].is_zero():
                            continue
                        s = s + gi[k][lam] * (dg[nu][lam][mu] + dg[lam][mu][nu] - dg[nu][mu][lam])
                    row.append(s * HALF)
                rows.append(tuple(row))
            out.append(tuple(rows))
        return tuple(out)


def christoffel(metric: Metric):
    return metric.christoffel


@dataclass(frozen=True)
class VectorField:
    coords: tuple[str, ...]
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        comps = tuple(as_scalar(c) for c in self.components)
        if len(comps) != len(self.coords):
            raise ValueError("one component per coordinate is required")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, coords) -> "VectorField":
        return cls(tuple(coords), [ZERO] * len(coords))

    def __neg__(self):
        return VectorField(self.coords, [-c for c in self.components])

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)


def gradient(f, metric: Metric) -> VectorField:
    f = as_scalar(f)
    X, gi = metric.coords, metric.g_inv
    comps = [sum((gi[m][k] * f.diff(X[k]) for k in range(metric.n)), ZERO) for m in range(metric.n)]
    return VectorField(X, comps)


def nabla_dir(nu: int, x: CForm, metric: Metric) -> CForm:
    """Levi-Civita derivative along d/dx^nu, with nabla_nu dx^k = -Gamma^k_{nu l} dx^l."""
    X, G = metric.coords, metric.christoffel
    pos = {c: k for k, c in enumerate(X)}
    name = X[nu]
    out = ZERO_CFORM
    for idx, c in x.terms.items():
        dc = c.diff(name)
        if not dc.is_zero():
            out = out + CForm._raw({idx: dc})
        for j, k in enumerate(idx):
            repl = {}
            for lam in range(metric.n):
                gam = G[pos[k]][nu][lam]
                if not gam.is_zero():
                    repl[(X[lam],)] = -gam
            if repl:
                out = out + wedge(wedge(dx(*idx[:j]), CForm._raw(repl)), dx(*idx[j + 1:])).scale(c)
    return out


def delta_diff(x: CForm, metric: Metric) -> CForm:
    """g^{mu nu} d/dx^mu contracted into nabla_nu x; zero on functions."""
    X, gi = metric.coords, metric.g_inv
    x = x - x.component(0)
    if x.is_zero():
        return ZERO_CFORM
    out = ZERO_CFORM
    for nu in range(metric.n):
        nab = nabla_dir(nu, x, metric)
        if nab.is_zero():
            continue
        for mu in range(metric.n):
            if not gi[mu][nu].is_zero():
                out = out + interior(X[mu], nab).scale(gi[mu][nu])
    return out


def delta_v(x: CForm, v: VectorField) -> CForm:
    out = ZERO_CFORM
    for name, c in zip(v.coords, v.components):
        if not c.is_zero():
            out = out + interior(name, x).scale(c)
    return out


def christoffel_laplacian(metric: Metric, f) -> QScalar:
    """g^{mu nu} d_nu d_mu f - g^{mu nu} Gamma^k_{nu mu} d_k f."""
    f = as_scalar(f)
    X, gi, G, n = metric.coords, metric.g_inv, metric.christoffel, metric.n
    out = ZERO
    for mu in range(n):
        for nu in range(n):
            if gi[mu][nu].is_zero():
                continue
            out = out + gi[mu][nu] * f.diff(X[nu]).diff(X[mu])
            for k in range(n):
                out = out - gi[mu][nu] * G[k][nu][mu] * f.diff(X[k])
    return out


def divergence_laplacian(metric: Metric, f) -> QScalar:
    """|g|^(-1/2) d_nu(|g|^(1/2) g^{mu nu} d_mu f) with the square roots cleared.

    Expanding the product rule leaves (1/2) d_nu log|g| = (1/2) d_nu|g| / |g|, so
    only the determinant and its derivatives are needed.
    """
    f = as_scalar(f)
    X, gi, n = metric.coords, metric.g_inv, metric.n
    det = metric.det()
    out = ZERO
    for mu in range(n):
        fm = f.diff(X[mu])
        for nu in range(n):
            out = out + gi[mu][nu] * fm.diff(X[nu])
            out = out + (HALF * gi[mu][nu] * det.diff(X[nu]) / det + gi[mu][nu].diff(X[nu])) * fm
    return out


def laplace_beltrami_check(metric: Metric, f) -> QScalar:
    """delta_diff(df) minus the divergence-form Laplacian; zero when they agree."""
    lhs = delta_diff(d(fn(f)), metric).coeff()
    return lhs - divergence_laplacian(metric, f)


def laplace_display_check(metric: Metric, f) -> QScalar:
    """delta_diff(df) minus the Christoffel form of the Laplacian."""
    return delta_diff(d(fn(f)), metric).coeff() - christoffel_laplacian(metric, f)


def log_det_residuals(metric: Metric) -> list[str]:
    """Failures of d log|g| = tr(g^-1 dg) and d(g^-1) = -g^-1 dg g^-1, per coordinate."""
    X, g, gi, n = metric.coords, metric.g, metric.g_inv, metric.n
    det = metric.det()
    bad = []
    for name in X:
        dg = [[g[i][j].diff(name) for j in range(n)] for i in range(n)]
        tr = sum((gi[i][k] * dg[k][i] for i in range(n) for k in range(n)), ZERO)
        if det.diff(name) / det != tr:
            bad.append(f"trace identity fails along {name}")
        for i in range(n):
            for j in range(n):
                rhs = -sum((gi[i][a] * dg[a][b] * gi[b][j] for a in range(n) for b in range(n)), ZERO)
                if gi[i][j].diff(name) != rhs:
                    bad.append(f"inverse derivative fails at ({i}, {j}) along {name}")
    return bad


def lie_derivative_check(v: VectorField, eta: CForm) -> CForm:
    """(d delta_v + delta_v d) eta minus (d_b v^a) eta_a dx^b + v^a (d_a eta_b) dx^b."""
    lhs = d(delta_v(eta, v)) + delta_v(d(eta), v)
    X = v.coords
    rhs = {}
    for b in X:
        s = ZERO
        for a, va in zip(X, v.components):
            s = s + va.diff(b) * eta.coeff(a) + va * eta.coeff(b).diff(a)
        rhs[(b,)] = s
    return lhs - CForm._raw(rhs)


# -- the homotopy backend --------------------------------------------------------

class ClassicalBackend:
    """Forms on R^n with delta = diff_coeff * delta_diff + drift_coeff * delta_v."""

    name = "classical"
    graded_commutative = True

    def __init__(self, metric: Metric, v: VectorField | None = None,
                 diff_coeff=ONE, drift_coeff=ONE, poly_degree: int = 2):
        self.metric = metric
        self.v = v if v is not None else VectorField.zero(metric.coords)
        self.diff_coeff = as_scalar(diff_coeff)
        self.drift_coeff = as_scalar(drift_coeff)
        self.poly_degree = poly_degree
        self.max_degree = metric.n + 1

    def zero(self):
        return ZERO_CFORM

    def components(self, x):
        return {k: x.component(k) for k in sorted(x.degrees())}

    def d(self, x):
        return d(x)

    def wedge(self, x, y):
        return wedge(x, y)

    def delta(self, x):
        out = ZERO_CFORM
        if not self.diff_coeff.is_zero():
            out = out + delta_diff(x, self.metric).scale(self.diff_coeff)
        if not self.drift_coeff.is_zero() and not self.v.is_zero():
            out = out + delta_v(x, self.v).scale(self.drift_coeff)
        return out

    def dt(self, x):
        return time_derivative(x)

    def random_element(self, rng, degree):
        X = self.metric.coords
        if degree < 0 or degree > len(X):
            return ZERO_CFORM
        out = ZERO_CFORM
        for idx in rng.sample(list(combinations(X, degree)), k=1 if degree else 1):
            out = out + CForm._raw({idx: random_poly(rng, X + ("t",), self.poly_degree)})
        return out


def random_poly(rng: random.Random, names, degree: int, terms: int = 2) -> QScalar:
    out = ZERO
    for _ in range(terms):
        c = QScalar.const(rng.choice([1, -1, 2, -2, 3]))
        for _ in range(rng.randint(0, degree)):
            c = c * QScalar.symbol(rng.choice(names))
        out = out + c
    return out


def random_metric(rng: random.Random, coords=("x1", "x2")) -> Metric:
    """P^T D P with P unipotent and D diagonal with entries 1 + c y^2; degree <= 2, non-diagonal."""
    if len(coords) != 2:
        raise ValueError("random_metric builds 2-dimensional metrics")
    x1, x2 = (QScalar.symbol(c) for c in coords)
    d1 = ONE + QScalar.const(rng.randint(1, 3)) * rng.choice([x1, x2]) ** 2
    d2 = QScalar.const(rng.randint(1, 3)) + rng.choice([x1, x2]) ** 2
    p = QScalar.const(rng.choice([-2, -1, 1, 2]))
    g = [[d1, p * d1], [p * d1, p * p * d1 + d2]]
    gi = [[ONE / d1 + p * p / d2, -p / d2], [-p / d2, ONE / d2]]
    return Metric(tuple(coords), g, gi)


def random_diagonal_metric(rng: random.Random, coords=("x1", "x2")) -> Metric:
    syms = [QScalar.symbol(c) for c in coords]
    entries = [QScalar.const(rng.randint(1, 3)) + rng.choice(syms) ** 2 for _ in coords]
    return Metric.diagonal(coords, entries)


# -- Ito calculus -------------------------------------------------------------------

def timed_fn(f) -> TimedElem:
    return TimedElem(fn(f), ZERO_CFORM)


def timed_form(x: CForm, rho: CForm | None = None) -> TimedElem:
    return TimedElem(x, rho if rho is not None else ZERO_CFORM)


DT = TimedElem(ZERO_CFORM, ONE_CFORM)


def ito_backend(metric: Metric, v: VectorField | None = None, alpha=HALF, beta=ONE) -> ClassicalBackend:
    return ClassicalBackend(metric, v, alpha, beta)


def ito_d(f, metric: Metric, v: VectorField | None = None, alpha=HALF, beta=ONE) -> TimedElem:
    """d_{alpha beta} f with delta = alpha delta_diff + beta delta_v."""
    B = ito_backend(metric, v, alpha, beta)
    x = f if isinstance(f, TimedElem) else timed_fn(f)
    return d_alpha(x, ONE, B)


def ito_wedge(x: TimedElem, y: TimedElem, metric: Metric, v=None, alpha=HALF, beta=ONE) -> TimedElem:
    return wedge_alpha(x, y, ONE, ito_backend(metric, v, alpha, beta))


def _partials(f: QScalar, X):
    return [f.diff(c) for c in X]


def ito_display_residuals(f, h, metric: Metric, v: VectorField | None = None) -> dict[str, TimedElem]:
    """Residuals of the Ito-Stratonovich identities at alpha = 1/2, beta = 1."""
    f, h = as_scalar(f), as_scalar(h)
    v = v if v is not None else VectorField.zero(metric.coords)
    X, gi, G, n = metric.coords, metric.g_inv, metric.christoffel, metric.n
    B = ito_backend(metric, v)
    dI = lambda y: d_alpha(y if isinstance(y, TimedElem) else timed_fn(y), ONE, B)
    wI = lambda a, b: wedge_alpha(a, b, ONE, B)
    xs = [QScalar.symbol(c) for c in X]
    df, dh = _partials(f, X), _partials(h, X)
    gdot = lambda a, b: sum((gi[i][k] * a[i] * b[k] for i in range(n) for k in range(n)), ZERO)
    dt_of = lambda c: TimedElem(ZERO_CFORM, fn(c))
    out: dict[str, TimedElem] = {}

    lap = christoffel_laplacian(metric, f)
    drift = sum((v.components[i] * df[i] for i in range(n)), ZERO)
    out["d_I f = df + (f_t + Lap f / 2 + v.grad f) dt"] = dI(f) - (
        timed_form(d(fn(f))) + dt_of(f.diff("t") + HALF * lap + drift)
    )

    dIx = [dI(x) for x in xs]
    for l in range(n):
        corr = sum((gi[j][k] * G[l][j][k] for j in range(n) for k in range(n)), ZERO)
        out[f"d_I {X[l]} = d{X[l]} + (v^l - g^jk Gamma^l_jk / 2) dt"] = dIx[l] - (
            timed_form(dx(X[l])) + dt_of(v.components[l] - HALF * corr)
        )

    hess = sum((gi[i][j] * f.diff(X[i]).diff(X[j]) for i in range(n) for j in range(n)), ZERO)
    basis = TimedElem(ZERO_CFORM, ZERO_CFORM)
    for i in range(n):
        basis = basis + dIx[i].scale(df[i])
    out["d_I f = f_i d_I x^i + (f_t + a^ij f_ij / 2) dt"] = dI(f) - (basis + dt_of(f.diff("t") + HALF * hess))

    strat, strat_rhs = TimedElem(ZERO_CFORM, ZERO_CFORM), TimedElem(ZERO_CFORM, ZERO_CFORM)
    fi = [f if i % 2 == 0 else h for i in range(n)]
    for i in range(n):
        strat = strat + wI(timed_fn(fi[i]), dIx[i])
        corr = sum((gi[i][j] * fi[i].diff(X[j]) for j in range(n)), ZERO)
        strat_rhs = strat_rhs + dIx[i].scale(fi[i]) + dt_of(HALF * corr)
    out["f^i ^_I d_I x^i = f^i d_I x^i + g^ij d_j f^i / 2 dt"] = strat - strat_rhs

    fdh = wI(timed_fn(f), dI(h))
    out["f ^_I d_I h = f d_I h + g^ik f_i h_k / 2 dt"] = fdh - (dI(h).scale(f) + dt_of(HALF * gdot(df, dh)))
    out["d_I(f h) = f ^_I d_I h + d_I f ^_I h"] = dI(f * h) - (fdh + wI(dI(f), timed_fn(h)))
    out["d_I(f h) = f d_I h + h d_I f + g^ik f_i h_k dt"] = ito_product_check(f, h, metric, v)

    eta = timed_form(dx(X[0]).scale(h) + dx(X[-1]).scale(f * f))
    grad_f = gradient(f, metric)
    contr = delta_v(eta.omega, grad_f).coeff()
    left, right = wI(timed_fn(f), eta), wI(eta, timed_fn(f))
    out["f ^_I eta = f eta + alpha grad f . eta dt"] = left - (eta.scale(f) + dt_of(HALF * contr))
    out["f ^_I eta = eta ^_I f"] = left - right
    out["delta_v(f eta) = f delta_v(eta)"] = timed_form(delta_v(eta.omega.scale(f), v) - delta_v(eta.omega, v).scale(f))
    return out


def ito_product_check(f, h, metric: Metric, v: VectorField | None = None) -> TimedElem:
    """d_I(fh) - f d_I h - h d_I f - g^{ik} f_i h_k dt."""
    f, h = as_scalar(f), as_scalar(h)
    X, gi, n = metric.coords, metric.g_inv, metric.n
    cross = sum((gi[i][k] * f.diff(X[i]) * h.diff(X[k]) for i in range(n) for k in range(n)), ZERO)
    return ito_d(f * h, metric, v) - ito_d(h, metric, v).scale(f) - ito_d(f, metric, v).scale(h) - TimedElem(
        ZERO_CFORM, fn(cross)
    )


def ito_line_residuals() -> dict[str, TimedElem]:
    """The one-dimensional flat examples: d_I(x^2) and f ^_I d_I x."""
    metric = Metric.flat(("x",))
    x, t = QScalar.symbol("x"), QScalar.symbol("t")
    out = {}
    out["d_I(x^2) = 2x dx + dt"] = ito_d(x * x, metric) - (timed_form(dx("x").scale(2 * x)) + DT)
    f = x**3 * t + 2 * x
    out["d_I f = f_x d_I x + (f_t + f_xx / 2) d_I t"] = ito_d(f, metric) - (
        ito_d(x, metric).scale(f.diff("x")) + DT.scale(f.diff("t") + HALF * f.diff("x").diff("x"))
    )
    out["f ^_I d_I x = f d_I x + f_x / 2 d_I t"] = ito_wedge(timed_fn(f), ito_d(x, metric), metric) - (
        ito_d(x, metric).scale(f) + DT.scale(HALF * f.diff("x"))
    )
    return out


# -- the Girsanov closedness condition --------------------------------------------

@dataclass
class GirsanovReport:
    xi: TimedElem
    d_xi: TimedElem
    R1: CForm
    R2: CForm
    R2_direct: CForm
    kappa: CForm
    kappa_display: CForm
    E1: CForm
    structure: CForm

    @property
    def closed(self) -> bool:
        return self.d_xi.is_zero()

    def as_dict(self) -> dict:
        return {
            "closed": self.closed,
            "R1": str(self.R1),
            "R2": str(self.R2),
            "R2_direct": str(self.R2_direct),
            "kappa": str(self.kappa),
            "kappa_display": str(self.kappa_display),
            "E1": str(self.E1),
            "structure": str(self.structure),
        }


def girsanov_residuals(metric: Metric, v: VectorField) -> GirsanovReport:
    """Close xi = g_ij v^j d_I x^i + g_ij v^i v^j / 2 dt under the drift -v.

    R2 is the dx^dx part of d_I xi and R1 the coefficient of ^dt.  kappa is
    built from its definition through the connection on 2-forms, kappa_display
    from its expanded Christoffel form.  E1 is lhs - rhs of the first
    closedness PDE, and ``structure`` checks

        R1 = -E1 + 1/2 v^i (d_i w_k - d_k w_i) dx^k - kappa / 2,   w_k = g_kj v^j.
    """
    X, g, gi, G, n = metric.coords, metric.g, metric.g_inv, metric.christoffel, metric.n
    vc = v.components
    B = ito_backend(metric, -v)
    w = [sum((g[i][j] * vc[j] for j in range(n)), ZERO) for i in range(n)]
    dw = [[w[i].diff(X[k]) for i in range(n)] for k in range(n)]  # dw[k][i] = d_k w_i

    xi = TimedElem(ZERO_CFORM, fn(HALF * sum((g[i][j] * vc[i] * vc[j] for i in range(n) for j in range(n)), ZERO)))
    for i in range(n):
        xi = xi + d_alpha(timed_fn(QScalar.symbol(X[i])), ONE, B).scale(w[i])
    dxi = d_alpha(xi, ONE, B)

    R2_direct = CForm._raw({(X[l], X[i]): dw[l][i] - dw[i][l] for l in range(n) for i in range(l + 1, n)})

    two = ZERO_CFORM
    for k in range(n):
        for i in range(n):
            if k != i and not dw[k][i].is_zero():
                two = two + dx(X[k], X[i]).scale(dw[k][i])
    kappa = ZERO_CFORM
    for nn in range(n):
        conn = ZERO_CFORM
        for k in range(n):
            for i in range(n):
                if k != i and not dw[k][i].is_zero():
                    conn = conn + nabla_dir(nn, dx(X[k], X[i]), metric).scale(dw[k][i])
        for m in range(n):
            if not gi[m][nn].is_zero():
                kappa = kappa + interior(X[m], conn).scale(gi[m][nn])

    kd = {}
    for i in range(n):
        s = ZERO
        for m in range(n):
            for nn in range(n):
                if gi[m][nn].is_zero():
                    continue
                for k in range(n):
                    s = s + gi[m][nn] * ((dw[i][k] - dw[k][i]) * G[k][nn][m] + (dw[k][m] - dw[m][k]) * G[k][nn][i])
        kd[(X[i],)] = s
    kappa_display = CForm._raw(kd)

    e1, struct = {}, {}
    for k in range(n):
        s = w[k].diff("t")
        for m in range(n):
            for nn in range(n):
                s = s + HALF * gi[m][nn] * w[k].diff(X[nn]).diff(X[m])
                s = s + HALF * gi[m][nn].diff(X[k]) * dw[nn][m]
        for i in range(n):
            s = s - HALF * w[i] * vc[i].diff(X[k]) - HALF * vc[i] * dw[i][k]
        e1[(X[k],)] = s
        struct[(X[k],)] = sum((HALF * vc[i] * (dw[i][k] - dw[k][i]) for i in range(n)), ZERO) - s
    E1 = CForm._raw(e1)
    structure = dxi.rho - (CForm._raw(struct) - kappa.scale(HALF))
    return GirsanovReport(xi, dxi, dxi.rho, dxi.omega, R2_direct, kappa, kappa_display, E1, structure)


def gradient_drift(F, metric: Metric) -> VectorField:
    """v^i = g^{ij} d_j F, for which g_ij v^j d x^i = dF is exact."""
    return gradient(F, metric)


# -- deformed covariant derivative -----------------------------------------------

class TensorPair:
    """sum_r e_r (x)_alpha w_r with left legs the bare basis 1-forms dx^i and dt.

    Any left coefficient is pushed to the right through
    (xi ^_alpha f) (x) eta = xi (x) (f ^_alpha eta).
    """

    __slots__ = ("legs",)

    def __init__(self, legs=None):
        self.legs = {k: w for k, w in (legs or {}).items() if not w.is_zero()}

    def __add__(self, other):
        legs = dict(self.legs)
        for k, w in other.legs.items():
            legs[k] = legs[k] + w if k in legs else w
        return TensorPair(legs)

    def __neg__(self):
        return TensorPair({k: -w for k, w in self.legs.items()})

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self) -> bool:
        return not self.legs

    def __eq__(self, other):
        return isinstance(other, TensorPair) and (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted(self.legs)))

    def leg(self, key) -> TimedElem:
        return self.legs.get(key, TimedElem(ZERO_CFORM, ZERO_CFORM))

    def __str__(self):
        if not self.legs:
            return "0"
        parts = []
        for k in _leg_order(self.legs):
            left = "dt" if k == "dt" else f"d{k}"
            parts.append(f"{left} (x) ({render_timed(self.legs[k])})")
        return " + ".join(parts)


def _leg_order(legs):
    return sorted(legs, key=lambda k: len(COORDINATES) if k == "dt" else _ORDER[k])


def basis_leg(key) -> TimedElem:
    return DT if key == "dt" else timed_form(dx(key))


def tensor(left: TimedElem, right: TimedElem, alpha, backend) -> TensorPair:
    """left (x)_alpha right in normal form; left must have degree one."""
    om, rho = left.omega, left.rho
    if om.degrees() - {1} or rho.degrees() - {0}:
        raise ValueError("the left leg of a tensor must be a 1-form")
    legs: dict = {}

    def put(key, w):
        legs[key] = legs[key] + w if key in legs else w

    ct = rho.coeff()
    for (name,), c in om.terms.items():
        put(name, wedge_alpha(timed_fn(c), right, alpha, backend))
        ct = ct - wedge_alpha(basis_leg(name), timed_fn(c), alpha, backend).rho.coeff()
    if not ct.is_zero():
        put("dt", wedge_alpha(timed_fn(ct), right, alpha, backend))
    return TensorPair(legs)


def tensor_left_mul(f: TimedElem, T: TensorPair, alpha, backend) -> TensorPair:
    """f ^_alpha T for a function f."""
    out = TensorPair()
    for key, w in T.legs.items():
        out = out + tensor(wedge_alpha(f, basis_leg(key), alpha, backend), w, alpha, backend)
    return out


def nabla0(x: TimedElem, metric: Metric) -> TensorPair:
    """Levi-Civita derivative with time added: nabla + dt (x) d/dt, and nabla(dt) = 0."""
    legs = {}
    for nu, name in enumerate(metric.coords):
        legs[name] = TimedElem(nabla_dir(nu, x.omega, metric), nabla_dir(nu, x.rho, metric))
    legs["dt"] = TimedElem(time_derivative(x.omega), time_derivative(x.rho))
    return TensorPair(legs)


def nabla_alpha(x: TimedElem | CForm, metric: Metric, alpha, backend=None) -> TensorPair:
    """(I (x) I) nabla_0 I^-1, returned in normal form for (x)_alpha."""
    alpha = as_scalar(alpha)
    B = backend or ClassicalBackend(metric, None, ONE, ZERO)
    if isinstance(x, CForm):
        x = timed_form(x)
    T0 = nabla0(iso_inv(x, alpha, B), metric)
    out = TensorPair()
    for key, w in T0.legs.items():
        out = out + tensor(iso(basis_leg(key), alpha, B), iso(w, alpha, B), alpha, B)
    return out


def nabla_leibniz_residual(f: TimedElem, xi: TimedElem, metric: Metric, alpha, backend=None) -> TensorPair:
    """nabla_a(f ^_a I(xi)) - d_a(f) (x) I(xi) - f ^_a nabla_a(I(xi))."""
    alpha = as_scalar(alpha)
    B = backend or ClassicalBackend(metric, None, ONE, ZERO)
    Ixi = iso(xi, alpha, B)
    lhs = nabla_alpha(wedge_alpha(f, Ixi, alpha, B), metric, alpha, B)
    rhs = tensor(d_alpha(f, alpha, B), Ixi, alpha, B) + tensor_left_mul(f, nabla_alpha(Ixi, metric, alpha, B), alpha, B)
    return lhs - rhs


def nabla_undeformed_expected(k: str, metric: Metric) -> TensorPair:
    """-Gamma^k_{pq} dx^p (x) dx^q."""
    X, G = metric.coords, metric.christoffel
    kk = X.index(k)
    legs = {}
    for p in range(metric.n):
        legs[X[p]] = timed_form(CForm._raw({(X[q],): -G[kk][p][q] for q in range(metric.n)}))
    return TensorPair(legs)


def alpha_series(T: TensorPair, order: int) -> TensorPair:
    """Coefficient of alpha^order in a tensor whose coefficients are polynomial in alpha."""
    def coeff(c: QScalar) -> QScalar:
        for _ in range(order):
            c = c.diff("alpha")
        fact = 1
        for j in range(2, order + 1):
            fact *= j
        return c.subs({"alpha": 0}) / fact

    legs = {}
    for key, w in T.legs.items():
        legs[key] = TimedElem(w.omega.map_coeffs(coeff), w.rho.map_coeffs(coeff))
    return TensorPair(legs)


def nabla_alpha_linear_display(k: str, metric: Metric) -> TensorPair:
    """The alpha-linear part of nabla_alpha(dx^k) as displayed for the diffusion homotopy."""
    X, G, gi, n = metric.coords, metric.christoffel, metric.g_inv, metric.n
    kk = X.index(k)
    legs = {}
    R = range(n)
    for m in R:
        s = ZERO
        for i in R:
            for j in R:
                if gi[i][j].is_zero():
                    continue
                inner = G[kk][j][i].diff(X[m])
                for t in R:
                    inner = inner + G[kk][m][t] * G[t][j][i] - G[t][j][m] * G[kk][t][i] - G[t][i][m] * G[kk][j][t]
                s = s + gi[i][j] * inner
        legs[X[m]] = TimedElem(ZERO_CFORM, fn(s))
    dt_leg = {}
    for q in R:
        s = ZERO
        for i in R:
            for j in R:
                if gi[i][j].is_zero():
                    continue
                inner = -G[kk][i][q].diff(X[j])
                for p in R:
                    inner = inner + G[kk][p][q] * G[p][j][i]
                s = s + gi[i][j] * inner
        dt_leg[(X[q],)] = s
    legs["dt"] = timed_form(CForm._raw(dt_leg))
    return TensorPair(legs)


# -- configuration and text -------------------------------------------------------

@dataclass
class ClassicalConfig:
    metric: Metric
    v: VectorField
    extra: dict = field(default_factory=dict)


def load_config(source) -> ClassicalConfig:
    """Read {"coords": [...], "g": [[...]], "g_inv": [[...]], "v": [...]} from JSON.

    Entries are strings in the scalar grammar or numbers.  ``g_inv`` may be
    omitted for a diagonal ``g``.
    """
    if isinstance(source, dict):
        cfg = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        cfg = json.loads(text)
    coords = tuple(cfg["coords"])
    conv = lambda e: as_scalar(str(e) if not isinstance(e, str) else e)
    g = [[conv(e) for e in row] for row in cfg["g"]]
    if "g_inv" in cfg:
        metric = Metric(coords, g, [[conv(e) for e in row] for row in cfg["g_inv"]])
    else:
        n = len(coords)
        if any(not g[i][j].is_zero() for i in range(n) for j in range(n) if i != j):
            raise ValueError("g_inv is required for a non-diagonal metric")
        metric = Metric.diagonal(coords, [g[i][i] for i in range(n)])
    v = VectorField(coords, [conv(e) for e in cfg.get("v", [0] * len(coords))])
    extra = {k: val for k, val in cfg.items() if k not in ("coords", "g", "g_inv", "v")}
    return ClassicalConfig(metric, v, extra)


def render_cform(x: CForm, suffix: str = "") -> str:
    pieces = []
    for idx, c in x.terms.items():
        basis = "*".join([f"d{n}" for n in idx] + ([suffix] if suffix else []))
        if not basis:
            s = render_scalar(c)
            pieces.append(s if _simple(s) else f"({s})")
        else:
            pieces.append(_coeff_prefix(c) + basis)
    return _join(pieces)


def _simple(s: str) -> bool:
    return bool(_SIMPLE.match(s))


def _join(pieces) -> str:
    if not pieces:
        return "0"
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def render_timed(x: TimedElem) -> str:
    a = render_cform(x.omega) if not x.omega.is_zero() else ""
    b = render_cform(x.rho, "dt") if not x.rho.is_zero() else ""
    if a and b:
        return a + (f" - {b[1:]}" if b.startswith("-") else f" + {b}")
    return a or b or "0"


def parse_timed(text: str) -> TimedElem:
    return Parser(text, ClassicalDomain()).parse()


def _plain_wedge(x: TimedElem, y: TimedElem) -> TimedElem:
    omega = wedge(x.omega, y.omega)
    rho = wedge(x.omega, y.rho)
    for m, eta in ((k, y.omega.component(k)) for k in y.omega.degrees()):
        rho = rho + wedge(x.rho, eta).scale((-1) ** m)
    return TimedElem(omega, rho)


class ClassicalDomain(Domain):
    """Parser hooks: forms in dx, dy, dz, dx1..dx4 and dt; products are undeformed wedges."""

    name = "classical"

    def lift(self, c):
        return timed_fn(c)

    def atom(self, name):
        if name == "dt":
            return DT
        if name.startswith("d") and name[1:] in _ORDER:
            return timed_form(dx(name[1:]))
        return super().atom(name)

    def as_scalar(self, x):
        if not x.rho.is_zero() or x.omega.degrees() - {0}:
            return None
        return x.omega.coeff()

    def mul(self, x, y):
        return _plain_wedge(x, y)

    def power(self, x, k):
        if k < 0:
            return super().power(x, k)
        out = timed_fn(ONE)
        for _ in range(k):
            out = _plain_wedge(out, x)
        return out

    def wedge_power(self, x, y):
        return _plain_wedge(x, y)

    def star(self, x):
        raise ValueError("star(...) is not defined for classical forms")
