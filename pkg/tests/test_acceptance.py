"""Acceptance criteria 1-10, each with its tolerance (exact) and time limit.

Run with pytest for one PASS/FAIL line per criterion in the terminal summary,
or directly:  python tests/test_acceptance.py
"""

from __future__ import annotations

import os
import random
import subprocess
import sys
import time
from dataclasses import dataclass, field

import pytest

from qdeform.suites import SuiteConfig, run_suite


@dataclass
class Outcome:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append((label, bool(ok), detail))

    def suite(self, name: str, **cfg) -> None:
        rep = run_suite(name, SuiteConfig(**cfg))
        bad = [f"{r.id} at {r.instance}" for r in rep.records if r.status != "exact-zero"]
        total = sum(r.checked for r in rep.records)
        self.add(f"suite {name} ({total} instances)", rep.passed, "; ".join(bad))

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)


CRITERIA: dict[int, tuple[str, float, object]] = {}


def criterion(n: int, title: str, limit: float):
    def deco(fn):
        CRITERIA[n] = (title, limit, fn)
        return fn
    return deco


@criterion(1, "qsl2 relations and star, exponents <= 3", 5)
def _c1(out: Outcome):
    out.suite("qsl2-relations")


@criterion(2, "d on generators reproduces the closed forms, n,m,p <= 5", 30)
def _c2(out: Outcome):
    out.suite("d-prop")


@criterion(3, "delta on 1- and 2-forms, symbolic metric, n,m,p <= 4", 60)
def _c3(out: Outcome):
    out.suite("delta-props")


@criterion(4, "Laplacian on 0-, 1-, 2-forms, n,m,p <= 4", 120)
def _c4(out: Outcome):
    out.suite("laplace-props")


@criterion(5, "eigenforms with displayed eigenvalues", 120)
def _c5(out: Outcome):
    for name in ("eigen-0", "eigen-1", "eigen-2"):
        out.suite(name)


@criterion(6, "harmonic kernels at bounds 2-4", 60)
def _c6(out: Outcome):
    out.suite("harmonic")


@criterion(7, "Hodge operator: double Hodge iff, Hermitian pairs, codifferential, integrals", 120)
def _c7(out: Outcome):
    for name in ("hodge-double", "hodge-codiff", "hodge-hermitian"):
        out.suite(name)


@criterion(8, "DGA axioms and the isomorphism I on both backends, 100 samples each", 120)
def _c8(out: Outcome):
    out.suite("dga-axioms-sphere", samples=100)
    out.suite("dga-axioms-classical", samples=100)


@criterion(9, "classical backend: Laplace, Lie, Ito, product, Girsanov, nabla_alpha", 120)
def _c9(out: Outcome):
    from qdeform.classical import VectorField, girsanov_residuals, random_metric, random_poly

    for name in ("ito", "girsanov", "nabla-alpha"):
        out.suite(name)
    # kappa = 0 on arbitrary degree <= 2 polynomial drifts, checked as stated
    rng = random.Random(9)
    names = ("x1", "x2")
    nonzero = []
    for k in range(5):
        metric = random_metric(rng)
        v = VectorField(names, [random_poly(rng, names, 2) for _ in names])
        rep = girsanov_residuals(metric, v)
        if not rep.kappa.is_zero():
            nonzero.append(
                f"sample {k}: v = ({', '.join(map(str, v.components))}), R2 = {rep.R2}, "
                f"kappa = kappa_display: {(rep.kappa - rep.kappa_display).is_zero()}"
            )
    out.add(
        "kappa = 0 on 5 seeded random metric/drift pairs",
        not nonzero,
        (
            "kappa is linear in d_i w_k - d_k w_i, so it vanishes only when the "
            "dx^dx condition R2 = 0 holds; nonzero on " + " | ".join(nonzero)
        ) if nonzero else "",
    )


def _random_alg(rng, terms=3):
    from qdeform.qsl2 import AlgElem, mono

    x = AlgElem({})
    for _ in range(rng.randint(1, terms)):
        m = mono(rng.choice("ad"), rng.randint(0, 3), rng.randint(0, 3), rng.randint(0, 3))
        x = x + AlgElem.monomial(m, _random_scalar(rng))
    return x


def _random_scalar(rng):
    from qdeform.qcoeff import ONE, QScalar, qpow

    num = QScalar.gaussian(rng.randint(-4, 4), rng.choice([0, 0, 1, -2])) * qpow(rng.randint(-3, 3))
    num = num + QScalar.const(rng.randint(-2, 2)) * qpow(rng.randint(0, 2))
    if rng.random() < 0.2:
        num = num / (ONE + qpow(2 * rng.randint(1, 2)))
    if rng.random() < 0.2:
        num = num * QScalar.symbol(rng.choice(["alpha", "beta", "t"]))
    return num if not num.is_zero() else ONE


def _round_trips(rng, n=500):
    from qdeform.cli import render
    from qdeform.classical import ClassicalBackend, Metric
    from qdeform.homotopy import random_timed
    from qdeform.parsing import parse, render_alg, render_form
    from qdeform.qcoeff import render_scalar
    from qdeform.qforms import SphereForm

    cb = ClassicalBackend(Metric.flat(("x1", "x2")))
    makers = {
        "scalar": (lambda: _random_scalar(rng), render_scalar),
        "algebra": (lambda: _random_alg(rng), render_alg),
        "form": (
            lambda: SphereForm(
                f0=_grade(rng, 0), fp=_grade(rng, -2), fm=_grade(rng, 2), g=_grade(rng, 0),
            ),
            render_form,
        ),
        "classical": (lambda: random_timed(cb, rng, rng.randint(0, 2)), render),
    }
    failures = {}
    for ctx, (make, rend) in makers.items():
        bad = []
        for _ in range(n):
            x = make()
            text = rend(x)
            try:
                back = parse(text, ctx)
            except Exception as exc:  # recorded as a failed round trip
                bad.append(f"{text!r}: {exc}")
                continue
            if back != x:
                bad.append(text)
        failures[ctx] = bad
    return failures


def _grade(rng, g):
    from qdeform.qsl2 import AlgElem, monomials_of_grade

    pool = monomials_of_grade(g, 3)
    x = AlgElem({})
    if rng.random() < 0.3:
        return x
    for m in rng.sample(pool, k=rng.randint(1, 2)):
        x = x + AlgElem.monomial(m, _random_scalar(rng))
    return x


# criteria 3-7 map to these suites; each criterion must fail under the fault
FAULT_GROUPS = {
    3: ("delta-props",),
    4: ("laplace-props",),
    5: ("eigen-0", "eigen-1", "eigen-2"),
    6: ("harmonic",),
    7: ("hodge-double", "hodge-codiff", "hodge-hermitian"),
}


def _suite_exit(name: str, fault: str | None) -> int:
    env = dict(os.environ)
    env.pop("QDEFORM_FAULT", None)
    if fault:
        env["QDEFORM_FAULT"] = fault
    proc = subprocess.run(
        [sys.executable, "-m", "qdeform.cli", "suite", name],
        env=env, capture_output=True, text=True, timeout=60,
    )
    return proc.returncode


@criterion(10, "parse/render round trip and suite exit codes under an injected fault", 60)
def _c10(out: Outcome):
    fails = _round_trips(random.Random(10))
    for ctx, bad in fails.items():
        out.add(f"round trip, 500 {ctx} elements", not bad, "; ".join(bad[:3]))
    clean = {"qsl2-relations": _suite_exit("qsl2-relations", None), "d-prop": _suite_exit("d-prop", None)}
    out.add("clean build: passing suites exit 0", all(c == 0 for c in clean.values()), str(clean))
    for crit, names in FAULT_GROUPS.items():
        # the fault must turn a suite that is green on the clean build red
        codes = {n: (_suite_exit(n, None), _suite_exit(n, "dc-power")) for n in names}
        flipped = [n for n, (c, f) in codes.items() if c == 0 and f == 1]
        out.add(
            f"fault dc-power breaks criterion {crit}",
            bool(flipped) and all(f in (0, 1) for _, f in codes.values()),
            f"(clean, fault) exit codes {codes}",
        )
    out.add("unknown fault name exits 2", _suite_exit("d-prop", "no-such-fault") == 2)


def evaluate(n: int) -> tuple[bool, str, Outcome, float]:
    title, limit, fn = CRITERIA[n]
    out = Outcome()
    t0 = time.perf_counter()
    fn(out)
    dt = time.perf_counter() - t0
    ok = out.ok and dt < limit
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {dt:6.1f}s/{limit:.0f}s  {title}"
    return ok, line, out, dt


def _explain(out: Outcome, dt: float, limit: float) -> str:
    lines = [f"  {'ok ' if ok else 'BAD'} {label}" + (f": {detail}" if detail and not ok else "")
             for label, ok, detail in out.checks]
    if dt >= limit:
        lines.append(f"  BAD time {dt:.1f}s exceeds {limit:.0f}s")
    return "\n".join(lines)


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, request):
    ok, line, out, dt = evaluate(n)
    request.config.acceptance_lines[n] = line
    print(line)
    assert ok, "\n" + _explain(out, dt, CRITERIA[n][1])


if __name__ == "__main__":
    status = 0
    for n in sorted(CRITERIA):
        ok, line, out, dt = evaluate(n)
        print(line, flush=True)
        if not ok:
            print(_explain(out, dt, CRITERIA[n][1]))
            status = 1
    raise SystemExit(status)
