"""Text grammar shared by the CLI and the renderers.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/' | <juxtaposition>) unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' (integer | '(' signed integer ')' | '-' integer | atom))?
    atom    := integer | name | 'i' | '(' expr ')' | 'star' '(' expr ')'
             | 'e+' | 'e-' | 'dx1'..'dx4' | 'dt'

Which names are allowed depends on the context: scalars know the symbols of
``qcoeff.SYMBOLS``; the algebra context adds the generators a, b, c, d (a
run such as ``abc`` is read as ``a*b*c``); the form context adds ``e+`` and
``e-`` with ``*``, ``^`` or juxtaposition acting as the wedge product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .qcoeff import I, ONE, SYMBOLS, QScalar, render_scalar
from .qsl2 import AlgElem, GradeError, star

__all__ = [
    "ParseError",
    "parse",
    "parse_scalar",
    "parse_alg",
    "parse_form",
    "render_alg",
    "render_form",
    "render_alg_terms",
]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<eform>e[+-])
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class Domain:
    """Arithmetic hooks for one parsing context."""

    name = "scalar"

    def lift(self, c: QScalar):
        return c

    def atom(self, name: str):
        """Value of a bare name, or None if the name is unknown here."""
        if name == "i":
            return self.lift(I)
        if name in SYMBOLS:
            return self.lift(QScalar.symbol(name))
        return None

    def as_scalar(self, x) -> QScalar | None:
        return x if isinstance(x, QScalar) else None

    def mul(self, x, y):
        return x * y

    def power(self, x, k: int):
        if k < 0:
            s = self.as_scalar(x)
            if s is None:
                raise ValueError("negative powers are only allowed on scalars")
            return self.lift(s**k)
        return x**k

    def wedge_power(self, x, y):
        raise ValueError("exponent must be an integer")

    def star(self, x):
        raise ValueError("star(...) is not available for scalars")

    def finish(self, x):
        return x


class AlgDomain(Domain):
    name = "algebra"

    def lift(self, c):
        return AlgElem.scalar(c)

    def atom(self, name):
        v = super().atom(name)
        if v is not None:
            return v
        if name and set(name) <= set("abcd"):
            from .qsl2 import gen

            out = AlgElem.scalar(ONE)
            for ch in name:
                out = out * gen(ch)
            return out
        return None

    def as_scalar(self, x):
        if not x.terms:
            return QScalar.const(0)
        if len(x.terms) == 1 and x.grades() == {0}:
            (m, c), = x.terms.items()
            if m.n == m.m == m.p == 0:
                return c
        return None

    def star(self, x):
        return star(x)


class FormDomain(AlgDomain):
    name = "form"

    def lift(self, c):
        from .qforms import SphereForm

        return SphereForm(f0=AlgElem.scalar(c))

    def atom(self, name):
        from .qforms import SphereForm

        if name == "e+":
            from .qforms import E_PLUS

            return E_PLUS
        if name == "e-":
            from .qforms import E_MINUS

            return E_MINUS
        v = super().atom(name)
        if isinstance(v, AlgElem):
            return SphereForm(f0=v)
        return v

    def as_scalar(self, x):
        if x.fp or x.fm or x.g:
            return None
        return super().as_scalar(x.f0)

    def mul(self, x, y):
        from .qforms import wedge

        return wedge(x, y)

    def power(self, x, k):
        from .qforms import ONE_FORM

        if k < 0:
            return super().power(x, k)
        out = ONE_FORM
        for _ in range(k):
            out = self.mul(out, x)
        return out

    def wedge_power(self, x, y):
        return self.mul(x, y)

    def star(self, x):
        from .qforms import SphereForm

        if x.fp or x.fm or x.g:
            raise ValueError("star(...) applies to 0-forms only")
        return SphereForm(f0=star(x.f0))


DOMAINS = {"scalar": Domain, "algebra": AlgDomain, "form": FormDomain}


class Parser:
    def __init__(self, text: str, domain: Domain):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.dom = domain

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, self.text, tok.pos)

    def eat(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        self.i += 1

    def parse(self):
        if self.tok.kind == "end":
            raise self.error("empty expression")
        v = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def _starts_atom(self):
        t = self.tok
        return t.kind in ("num", "name", "eform") or t.text == "("

    def term(self):
        v = self.unary()
        while True:
            t = self.tok
            if t.text == "*":
                self.i += 1
                v = self.dom.mul(v, self.unary())
            elif t.text == "/":
                self.i += 1
                w = self.unary()
                s = self.dom.as_scalar(w)
                if s is None:
                    raise self.error("can only divide by a scalar", t)
                if s.is_zero():
                    raise self.error("division by zero", t)
                v = self.dom.mul(v, self.dom.lift(s.inverse()))
            elif self._starts_atom():
                v = self.dom.mul(v, self.power())
            else:
                return v

    def unary(self):
        if self.tok.text == "-":
            self.i += 1
            return -self.unary()
        if self.tok.text == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text != "^":
            return base
        hat = self.tok
        self.i += 1
        t = self.tok
        if t.kind == "num":
            self.i += 1
            k = int(t.text)
        elif t.text == "-" and self.toks[self.i + 1].kind == "num":
            k = -int(self.toks[self.i + 1].text)
            self.i += 2
        elif t.text == "(" and self._signed_int_in_parens():
            self.i += 1
            sign = 1
            if self.tok.text in ("-", "+"):
                sign = -1 if self.tok.text == "-" else 1
                self.i += 1
            k = sign * int(self.tok.text)
            self.i += 1
            self.eat(")")
        else:
            rhs = self.atom()
            try:
                return self.dom.wedge_power(base, rhs)
            except ValueError as exc:
                raise self.error(str(exc), hat) from None
        try:
            return self.dom.power(base, k)
        except (ValueError, ZeroDivisionError, ArithmeticError) as exc:
            raise self.error(str(exc), hat) from None

    def _signed_int_in_parens(self):
        j = self.i + 1
        if self.toks[j].text in ("-", "+"):
            j += 1
        return self.toks[j].kind == "num" and self.toks[j + 1].text == ")"

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return self.dom.lift(QScalar.const(Fraction(int(t.text))))
        if t.text == "(":
            self.i += 1
            v = self.expr()
            self.eat(")")
            return v
        if t.kind == "name" and t.text == "star" and self.toks[self.i + 1].text == "(":
            self.i += 2
            v = self.expr()
            self.eat(")")
            try:
                return self.dom.star(v)
            except ValueError as exc:
                raise self.error(str(exc), t) from None
        if t.kind in ("name", "eform"):
            v = self.dom.atom(t.text)
            if v is None:
                raise self.error(f"unknown name {t.text!r} in {self.dom.name} context")
            self.i += 1
            return v
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse(text: str, context: str = "algebra", *, check_grades: bool = True):
    """Parse ``text`` in one of the contexts scalar, algebra, sphere, form, classical."""
    if context == "classical":
        from .classical import parse_timed

        return parse_timed(text)
    dom = DOMAINS["algebra" if context == "sphere" else context]()
    value = Parser(text, dom).parse()
    if context == "sphere" and check_grades:
        bad = sorted({m.grade for m in value.terms if m.grade != 0})
        if bad:
            raise GradeError(f"element of S^2_q must have grade 0, found grades {bad}")
    if context == "form" and check_grades:
        value.validate()
    return value


def parse_scalar(text: str) -> QScalar:
    return parse(text, "scalar")


def parse_alg(text: str) -> AlgElem:
    return parse(text, "algebra")


def parse_form(text: str, check_grades: bool = True):
    return parse(text, "form", check_grades=check_grades)


# -- rendering ----------------------------------------------------------------

_SIMPLE = re.compile(r"^-?[A-Za-z0-9_^]+([*/][A-Za-z0-9_^]+)*$")


def _coeff_prefix(c: QScalar) -> str:
    s = render_scalar(c)
    if s == "1":
        return ""
    if s == "-1":
        return "-"
    if _SIMPLE.match(s):
        return s + "*"
    return f"({s})*"


def render_alg_terms(x: AlgElem) -> list[list[str]]:
    return [[render_scalar(c), str(m)] for m, c in x.terms.items()]


def render_alg(x: AlgElem) -> str:
    if not x.terms:
        return "0"
    pieces = []
    for m, c in x.terms.items():
        ms = str(m)
        if ms == "1":
            s = render_scalar(c)
            piece = s if _SIMPLE.match(s) else f"({s})"
        else:
            piece = _coeff_prefix(c) + ms
        pieces.append(piece)
    out = pieces[0]
    for p in pieces[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def render_form(x) -> str:
    pieces = []
    for label, coeff in (("", x.f0), ("e+", x.fp), ("e-", x.fm), ("e+^e-", x.g)):
        if not coeff:
            continue
        body = render_alg(coeff)
        if not label:
            pieces.append(body if len(coeff) == 1 else f"({body})")
        elif body == "1":
            pieces.append(label)
        else:
            pieces.append(f"{label} * ({body})" if len(coeff) > 1 or body.startswith("-") else f"{label} * {body}")
    return " + ".join(pieces) if pieces else "0"
