"""Command-line front end.

    qdeform parse form "e+ * a*b^3"
    qdeform laplacian "b*c" --hodge-values
    qdeform eigen 1-plus-a --n 1 --p 2
    qdeform deform axioms --backend classical --config metric.json
    qdeform suite eigen-0 --format json

Exit status: 0 when the command succeeds or a check passes, 1 when a check
fails, 2 on bad input (syntax errors, unknown suite or family, bad config).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import faults
from .qcoeff import ONE, QScalar, as_scalar, render_scalar, substitute_q

OK, FAILED, BAD_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


# -- rendering ------------------------------------------------------------------

def _specialize(x, qv):
    """Substitute q = qv in every coefficient of x."""
    from .classical import CForm
    from .homotopy import TimedElem
    from .qforms import SphereForm
    from .qsl2 import AlgElem

    if qv is None:
        return x
    f = lambda c: substitute_q(c, qv)
    if isinstance(x, QScalar):
        return f(x)
    if isinstance(x, (AlgElem, SphereForm, CForm)):
        return x.map_coeffs(f)
    if isinstance(x, TimedElem):
        return TimedElem(_specialize(x.omega, qv), _specialize(x.rho, qv))
    return x


def render(x) -> str:
    from .classical import CForm, render_cform, render_timed
    from .homotopy import TimedElem
    from .parsing import render_alg, render_form
    from .qforms import SphereForm
    from .qsl2 import AlgElem

    if isinstance(x, QScalar):
        return render_scalar(x)
    if isinstance(x, AlgElem):
        return render_alg(x)
    if isinstance(x, SphereForm):
        return render_form(x)
    if isinstance(x, CForm):
        return render_cform(x)
    if isinstance(x, TimedElem):
        if isinstance(x.omega, CForm):
            return render_timed(x)
        parts = [render(x.omega)] if not x.omega.is_zero() else []
        if not x.rho.is_zero():
            parts.append(f"({render(x.rho)}) ^ dt")
        return " + ".join(parts) or "0"
    return str(x)


def emit(args, payload: dict, text: str | None = None) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        print(text if text is not None else "\n".join(f"{k}: {v}" for k, v in payload.items()))


def _out(args, x) -> str:
    return render(_specialize(x, args.q))


# -- argument helpers -------------------------------------------------------------

def _parse(text: str, context: str, check_grades: bool = True):
    from .parsing import parse

    return parse(text, context, check_grades=check_grades)


def _metric_params(args):
    from .laplace import MetricParams

    if getattr(args, "hodge_values", False):
        return MetricParams.hodge_values(args.alpha, args.beta)
    kw = {k: getattr(args, k) for k in ("alpha", "beta", "gamma", "eps") if getattr(args, k) is not None}
    return MetricParams(**kw)


def _add_metric_flags(p, hodge_flag=True):
    for name in ("alpha", "beta", "gamma", "eps"):
        p.add_argument(f"--{name}", default=None, help=f"scalar expression (default: symbol {name})")
    if hodge_flag:
        p.add_argument("--hodge-values", action="store_true", help="gamma = q^2, eps = q^-4")


def _hodge_constants(args):
    from .hodge import HodgeConstants, solve_constants

    if args.M is None and args.N is None:
        return solve_constants(args.K, args.L)
    if args.M is None or args.N is None:
        raise UsageError("give both --M and --N, or neither")
    return HodgeConstants(K=args.K, L=args.L, M=args.M, N=args.N)


def _add_hodge_flags(p):
    p.add_argument("--K", default="i", help="purely imaginary constant (default i)")
    p.add_argument("--L", default="i", help="purely imaginary constant (default i)")
    p.add_argument("--M", default=None, help="override the solved M (write --M=-i for a leading minus)")
    p.add_argument("--N", default=None, help="override the solved N")


# -- sphere commands ----------------------------------------------------------------

def cmd_parse(args):
    x = _parse(args.text, args.context, not args.no_grade_check)
    out = _out(args, x)
    again = _parse(render(x), args.context, not args.no_grade_check)
    same = again == x
    emit(args, {"input": args.text, "context": args.context, "normal_form": out, "round_trip": same}, out)
    return OK if same else FAILED


def cmd_star(args):
    from .qsl2 import star

    y = star(_parse(args.expr, "algebra"))
    emit(args, {"input": args.expr, "star": _out(args, y)}, _out(args, y))
    return OK


def cmd_d(args):
    from .qforms import d

    y = d(_parse(args.form, "form"))
    emit(args, {"input": args.form, "d": _out(args, y)}, _out(args, y))
    return OK


def cmd_delta(args):
    from .laplace import delta

    y = delta(_parse(args.form, "form"), _metric_params(args))
    emit(args, {"input": args.form, "delta": _out(args, y)}, _out(args, y))
    return OK


def cmd_laplacian(args):
    from .laplace import laplacian, observed_eigenvalue

    P = _metric_params(args)
    x = _parse(args.form, "form")
    y = laplacian(x, P)
    lam = observed_eigenvalue(x, P)
    payload = {"input": args.form, "laplacian": _out(args, y), "eigenvalue": None if lam is None else _out(args, lam)}
    emit(args, payload, _out(args, y))
    return OK


def cmd_eigen(args):
    from .laplace import Family, MetricParams, eigenform, observed_eigenvalue, verify_eigen

    try:
        fam = Family(args.family)
    except ValueError:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(f.value for f in Family)}")
    P = MetricParams.hodge_values(args.alpha, args.beta) if fam.degree else _metric_params(args)
    ef = eigenform(fam, args.n, args.p, P)
    ok, res = verify_eigen(ef, P)
    obs = observed_eigenvalue(ef.form, P)
    payload = {
        "family": fam.value,
        "n": args.n,
        "p": args.p,
        "form": _out(args, ef.form),
        "eigenvalue": _out(args, ef.eigenvalue),
        "observed_eigenvalue": None if obs is None else _out(args, obs),
        "residual": _out(args, res),
        "exact_zero": ok,
    }
    emit(args, payload)
    return OK if ok else FAILED


def cmd_harmonic(args):
    from .laplace import MetricParams, harmonic_kernel

    P = MetricParams.hodge_values(args.alpha, args.beta)
    bound = 3 if args.bound is None else args.bound
    ker = harmonic_kernel(args.degree, bound, P)
    rows = [_out(args, k) for k in ker]
    emit(args, {"degree": args.degree, "bound": bound, "dimension": len(rows), "basis": rows},
         f"dim {len(rows)}" + "".join(f"\n  {r}" for r in rows))
    return OK


def cmd_hodge(args):
    from .hodge import hodge, hodge_inverse

    c = _hodge_constants(args)
    x = _parse(args.form, "form")
    y = hodge_inverse(x, c) if args.inverse else hodge(x, c)
    emit(args, {"input": args.form, "inverse" if args.inverse else "hodge": _out(args, y)}, _out(args, y))
    return OK


def _constants_dict(args, c) -> dict:
    out = {}
    for name in ("K", "L", "M", "N", "alpha", "beta", "gamma", "eps"):
        v = getattr(c, name)
        out[name] = None if v is None else _out(args, v)
    return out


def cmd_hodge_solve(args):
    from .hodge import solve_constants

    c = solve_constants(args.K, args.L)
    emit(args, _constants_dict(args, c))
    return OK


def cmd_hodge_verify(args):
    from .hodge import check_codifferential, check_double_hodge, hermitian_defects

    c = _hodge_constants(args)
    bound = 2 if args.bound is None else args.bound
    payload = {"constants": _constants_dict(args, c), "bound": bound}
    payload["double_hodge"] = check_double_hodge(c, bound)
    payload["hermitian"] = not hermitian_defects(c, bound)
    if c.alpha is not None:
        payload["codifferential"] = check_codifferential(c, None, bound)
    ok = all(v for k, v in payload.items() if isinstance(v, bool))
    emit(args, payload)
    return OK if ok else FAILED


def cmd_inner(args):
    from .hodge import inner

    c = _hodge_constants(args)
    v = inner(_parse(args.left, "form"), _parse(args.right, "form"), c, args.volume)
    emit(args, {"inner": _out(args, v)}, _out(args, v))
    return OK


def cmd_integrate(args):
    from .hodge import integrate

    v = integrate(_parse(args.form, "form"))
    emit(args, {"input": args.form, "integral": _out(args, v)}, _out(args, v))
    return OK


# -- homotopy deformation --------------------------------------------------------------

def _backend(args):
    if args.backend == "sphere":
        from .homotopy import SphereBackend

        return SphereBackend(_metric_params(args), bound=args.bound or 2)
    from .classical import ClassicalBackend, Metric, load_config

    if args.config:
        cfg = load_config(args.config)
        metric, v = cfg.metric, cfg.v
    else:
        metric, v = Metric.flat(("x1", "x2")), None
    a = ONE if args.alpha is None else as_scalar(args.alpha)
    b = ONE if args.beta is None else as_scalar(args.beta)
    return ClassicalBackend(metric, v, a, b)


def _deform_param(args):
    if args.s is not None:
        return as_scalar(args.s)
    return as_scalar("s") if args.backend == "sphere" else ONE


def _classical_arg(text: str, B):
    from .classical import COORDINATES

    x = _parse(text, "classical")
    used = set()
    for part in (x.omega, x.rho):
        for idx, c in part.terms.items():
            used |= set(idx) | (c.free_symbols() & set(COORDINATES))
    extra = sorted(used - set(B.metric.coords))
    if extra:
        raise UsageError(f"{text!r} uses {', '.join(extra)}, not among the metric coordinates {', '.join(B.metric.coords)}")
    return x


def _timed_arg(args, text: str, B, dt_part: str | None = None):
    from .homotopy import TimedElem

    if args.backend == "classical":
        if dt_part:
            raise UsageError("write the dt part inline for the classical backend, e.g. 'x1*dx1 + x2*dt'")
        return _classical_arg(text, B)
    from .qforms import ZERO_FORM

    rho = _parse(dt_part, "form") if dt_part else ZERO_FORM
    return TimedElem(_parse(text, "form"), rho)


_DEFORM_ARITY = {"d": 1, "wedge": 2, "iso": 1, "axioms": 0, "closed": 2}


def cmd_deform(args):
    from .homotopy import axiom_suite, closedness_analysis, d_alpha, iso, iso_inv, wedge_alpha

    op = args.op
    want = _DEFORM_ARITY[op]
    if len(args.operands) != want:
        raise UsageError(f"deform {op} takes {want} operand{'s' if want != 1 else ''}, got {len(args.operands)}")
    B = _backend(args)
    s = _deform_param(args)
    if op == "axioms":
        res = axiom_suite(B, s, samples=args.samples, seed=args.seed)
        rows = {n: {"checked": r.checked, "failures": len(r.failures)} for n, r in res.items()}
        ok = all(r.passed for r in res.values())
        emit(args, {"backend": B.name, "parameter": render(s), "passed": ok, "axioms": rows},
             "\n".join(f"{'ok  ' if r.passed else 'FAIL'} {n} [{r.checked}]" for n, r in res.items()))
        return OK if ok else FAILED
    if op == "closed":
        if args.backend != "classical":
            raise UsageError("closedness analysis is implemented for the classical backend")
        xi = _classical_arg(args.operands[0], B).omega
        a = _classical_arg(args.operands[1], B).omega
        w = _classical_arg(args.witness, B).omega if args.witness else None
        rep = closedness_analysis(xi, a, s, B, witness=w)
        emit(args, rep.as_dict())
        return OK if rep.closed else FAILED
    x = _timed_arg(args, args.operands[0], B, args.dt_part)
    if op == "d":
        y = d_alpha(x, s, B)
    elif op == "wedge":
        y = wedge_alpha(x, _timed_arg(args, args.operands[1], B), s, B)
    elif op == "iso":
        y = iso_inv(x, s, B) if args.inverse else iso(x, s, B)
    emit(args, {"backend": B.name, "op": op, "result": _out(args, y)}, _out(args, y))
    return OK


# -- classical calculus -------------------------------------------------------------------

def _nonzero(d: dict) -> dict:
    return {k: render(v) for k, v in d.items() if not v.is_zero()}


def cmd_classical(args):
    from .classical import (
        dx, girsanov_residuals, ito_display_residuals, laplace_beltrami_check, laplace_display_check,
        load_config, log_det_residuals, nabla_alpha,
    )

    cfg = load_config(args.config)
    metric, v = cfg.metric, cfg.v
    op = args.op
    if op == "laplace-check":
        f = as_scalar(args.f)
        res = {
            "christoffel form vs divergence form": laplace_beltrami_check(metric, f),
            "delta_diff(df) vs christoffel form": laplace_display_check(metric, f),
        }
        bad = _nonzero(res)
        logdet = log_det_residuals(metric)
        emit(args, {"f": render(f), "failures": bad, "log_det": logdet, "passed": not bad and not logdet})
        return OK if not bad and not logdet else FAILED
    if op == "ito":
        res = ito_display_residuals(as_scalar(args.f), as_scalar(args.h), metric, v)
        bad = _nonzero(res)
        emit(args, {"checked": len(res), "failures": bad, "passed": not bad})
        return OK if not bad else FAILED
    if op == "girsanov":
        rep = girsanov_residuals(metric, v)
        emit(args, rep.as_dict())
        return OK if rep.closed else FAILED
    if op == "nabla":
        a = as_scalar(args.alpha)
        out = {k: str(_specialize_tensor(nabla_alpha(dx(k), metric, a), args.q)) for k in metric.coords}
        emit(args, {"alpha": render(a), "nabla": out})
        return OK
    raise UsageError(f"unknown classical operation {op!r}")


def _specialize_tensor(T, qv):
    from .classical import TensorPair

    return T if qv is None else TensorPair({k: _specialize(w, qv) for k, w in T.legs.items()})


# -- suites -------------------------------------------------------------------------------

def cmd_suite(args):
    from .suites import SUITES, SuiteConfig, run_suite

    if args.list or not args.name:
        print("\n".join(SUITES))
        return OK if args.list else BAD_INPUT
    if args.name not in SUITES:
        raise UsageError(f"unknown suite {args.name!r}; choose from {', '.join(SUITES)}")
    rep = run_suite(args.name, SuiteConfig(seed=args.seed, bound=args.bound, samples=args.samples,
                                           fail_fast=args.fail_fast))
    print(rep.to_json(args.timing) if args.format == "json" else rep.to_text(args.timing))
    if any(r.status == "error" for r in rep.records):
        return BAD_INPUT
    return OK if rep.passed else FAILED


# -- parser -------------------------------------------------------------------------------

def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"--q needs a rational number, got {text!r}")


def _common(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps them from resetting values given earlier
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--q", type=_fraction, default=dflt(None), help="substitute a rational q in printed results")
    common.add_argument("--bound", type=int, default=dflt(None), help="exponent bound for enumerations")
    common.add_argument("--seed", type=int, default=dflt(0), help="seed for sampled identities (default 0)")
    common.add_argument("--format", choices=("json", "text"), default=dflt("text"))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    p = argparse.ArgumentParser(prog="qdeform", description=__doc__.splitlines()[0], parents=[_common(False)],
                                allow_abbrev=False)
    p.add_argument("--suite", default=None, help="run a named verification suite")
    p.add_argument("--fail-fast", action="store_true")
    p.add_argument("--timing", action="store_true", help="add wall time to suite reports")
    p.add_argument("--samples", type=int, default=100, help="samples per sampled identity")
    sub = p.add_subparsers(dest="command")

    def add(name, fn, help_text):
        sp = sub.add_parser(name, parents=[common], help=help_text, allow_abbrev=False)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "parse an expression and print its normal form")
    sp.add_argument("context", choices=("scalar", "algebra", "sphere", "form", "classical"))
    sp.add_argument("text")
    sp.add_argument("--no-grade-check", action="store_true")

    add("star", cmd_star, "star of an algebra element").add_argument("expr")
    add("d", cmd_d, "exterior derivative of a sphere form").add_argument("form")
    sp = add("delta", cmd_delta, "the homotopy delta of a sphere form")
    sp.add_argument("form")
    _add_metric_flags(sp)
    sp = add("laplacian", cmd_laplacian, "Laplacian of a sphere form")
    sp.add_argument("form")
    _add_metric_flags(sp)
    sp = add("eigen", cmd_eigen, "closed-form eigenform and its residual")
    sp.add_argument("family")
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--p", type=int, default=0)
    _add_metric_flags(sp, hodge_flag=False)
    sp = add("harmonic", cmd_harmonic, "kernel of the Laplacian on monomial forms")
    sp.add_argument("--degree", type=int, choices=(0, 1, 2), required=True)
    _add_metric_flags(sp, hodge_flag=False)

    sp = add("hodge", cmd_hodge, "apply the Hodge operator")
    sp.add_argument("form")
    sp.add_argument("--inverse", action="store_true")
    _add_hodge_flags(sp)
    _add_hodge_flags(add("hodge-solve", cmd_hodge_solve, "M, N, alpha, beta, gamma, eps from K, L"))
    _add_hodge_flags(add("hodge-verify", cmd_hodge_verify, "double Hodge, Hermitian and codifferential checks"))
    sp = add("inner", cmd_inner, "inner product of two forms")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--volume", default=None, help="value of the volume normalization (default N)")
    _add_hodge_flags(sp)
    add("integrate", cmd_integrate, "integral of a 2-form").add_argument("form")

    sp = add("deform", cmd_deform, "homotopy-deformed operations")
    sp.add_argument("op", choices=("d", "wedge", "iso", "axioms", "closed"))
    sp.add_argument("operands", nargs="*")
    sp.add_argument("--backend", choices=("sphere", "classical"), default="sphere")
    sp.add_argument("--s", default=None, help="deformation parameter (sphere default s, classical default 1)")
    sp.add_argument("--dt-part", default=None, help="sphere form multiplying dt")
    sp.add_argument("--inverse", action="store_true")
    sp.add_argument("--witness", default=None)
    sp.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    sp.add_argument("--config", default=None, help="JSON metric and drift for the classical backend")
    _add_metric_flags(sp, hodge_flag=False)

    sp = add("classical", cmd_classical, "Laplace-Beltrami, Ito, Girsanov and nabla_alpha checks")
    sp.add_argument("op", choices=("laplace-check", "ito", "girsanov", "nabla"))
    sp.add_argument("--config", required=True, help="JSON file or inline JSON with coords, g, g_inv, v")
    sp.add_argument("--f", default="x1^2*x2", help="test function")
    sp.add_argument("--h", default="x1 + t*x2", help="second test function")
    sp.add_argument("--alpha", default="alpha", help="deformation parameter for nabla")

    sp = add("suite", cmd_suite, "run a named verification suite")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--fail-fast", action="store_true", default=argparse.SUPPRESS)
    sp.add_argument("--timing", action="store_true", default=argparse.SUPPRESS)
    sp.add_argument("--samples", type=int, default=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    from .parsing import ParseError
    from .qsl2 import GradeError

    parser = build_parser()
    args = parser.parse_args(argv)
    if args.suite and args.command is None:
        args.fn, args.name, args.list = cmd_suite, args.suite, False
    if getattr(args, "fn", None) is None:
        parser.print_help()
        return BAD_INPUT
    try:
        faults.validate()
        if faults.ACTIVE:
            print(f"warning: fault {faults.ACTIVE!r} is active ({faults.KNOWN[faults.ACTIVE]})", file=sys.stderr)
        return args.fn(args)
    except (UsageError, ParseError, GradeError, ValueError, KeyError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
