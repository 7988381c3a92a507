"""Expression trees for holomorphic functions of one complex variable.

A :class:`HoloExpr` is evaluated either over the complex numbers
(:func:`eval_c`) or over A3 (:func:`eval_a3`).  Because rho^3 = 0, the A3
evaluation at ``z + rho`` is a second-order forward-mode jet: its components
are ``F(z)``, ``F'(z)`` and ``F''(z)/2``.

Text grammar (whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' ['-' | '+'] INT)?
    primary := NUMBER | 'z' | FUNC '(' expr ')' | '(' expr ')'
    NUMBER  := digits ['.' digits] [('e'|'E') ['+'|'-'] digits] ['i']
    FUNC    := exp | sin | cos | log
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import algebra as alg
from .algebra import A3Element
from .errors import ParseError, SingularEvaluation

# |divisor| at or below this is treated as a pole in complex evaluation
SINGULAR_TOL = 1e-14

FUNCTIONS = ("exp", "sin", "cos", "log")


@dataclass(frozen=True)
class Const:
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Sub:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Mul:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Div:
    left: "HoloExpr"
    right: "HoloExpr"


@dataclass(frozen=True)
class Pow:
    base: "HoloExpr"
    exponent: int

    def __post_init__(self):
        if int(self.exponent) != self.exponent:
            raise ValueError("Pow exponent must be an integer")
        object.__setattr__(self, "exponent", int(self.exponent))


@dataclass(frozen=True)
class Func:
    name: str
    arg: "HoloExpr"

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


HoloExpr = Union[Const, Var, Add, Sub, Mul, Div, Pow, Func]
_BINARY = {Add: "+", Sub: "-", Mul: "*", Div: "/"}

Z = Var()


@dataclass(frozen=True)
class JetValue:
    v0: complex
    v1: complex
    v2: complex


# -- evaluation -------------------------------------------------------------


class _ComplexBackend:
    one = 1 + 0j

    @staticmethod
    def const(v, x):
        return v

    @staticmethod
    def div(x, y):
        if np.any(np.abs(y) <= SINGULAR_TOL):
            raise SingularEvaluation("division by a (near-)zero value")
        # multiply by the reciprocal, exactly as the algebra does, so that
        # f(eval_a3) and eval_c agree bitwise
        return x * (1 / y)

    @classmethod
    def powi(cls, x, k):
        if k < 0:
            return alg.binary_power(cls.div(cls.one, x), -k, cls.one)
        return alg.binary_power(x, k, cls.one)

    @staticmethod
    def func(name, x):
        if name == "log" and np.any(np.abs(x) <= SINGULAR_TOL):
            raise SingularEvaluation("log at a branch point")
        return getattr(np, name)(x)


class _A3Backend:
    one = alg.ONE

    @staticmethod
    def const(v, x):
        return A3Element(v, 0j, 0j)

    @staticmethod
    def div(x, y):
        return alg.mul(x, alg.invert(y))

    @staticmethod
    def powi(x, k):
        return alg.powi_a3(x, k)

    @staticmethod
    def func(name, x):
        if name == "log" and np.any(np.abs(x.a) <= SINGULAR_TOL):
            raise SingularEvaluation("log at a branch point")
        return _A3_FUNCS[name](x)


_A3_FUNCS = {"exp": alg.exp_a3, "sin": alg.sin_a3, "cos": alg.cos_a3, "log": alg.log_a3}


def _evaluate(expr, x, be):
    if isinstance(expr, Var):
        return x
    if isinstance(expr, Const):
        return be.const(expr.value, x)
    if isinstance(expr, Add):
        return _evaluate(expr.left, x, be) + _evaluate(expr.right, x, be)
    if isinstance(expr, Sub):
        return _evaluate(expr.left, x, be) - _evaluate(expr.right, x, be)
    if isinstance(expr, Mul):
        return _evaluate(expr.left, x, be) * _evaluate(expr.right, x, be)
    if isinstance(expr, Div):
        return be.div(_evaluate(expr.left, x, be), _evaluate(expr.right, x, be))
    if isinstance(expr, Pow):
        return be.powi(_evaluate(expr.base, x, be), expr.exponent)
    if isinstance(expr, Func):
        return be.func(expr.name, _evaluate(expr.arg, x, be))
    raise TypeError(f"not a HoloExpr node: {expr!r}")


def eval_c(expr: HoloExpr, z):
    """Evaluate over C.  ``z`` may be a complex scalar or a numpy array."""
    z = np.asarray(z, dtype=complex)
    out = _evaluate(expr, z, _ComplexBackend)
    out = np.broadcast_to(out, z.shape)
    return complex(out) if out.ndim == 0 else np.array(out)


def eval_a3(expr: HoloExpr, zeta: A3Element) -> A3Element:
    """Evaluate over A3 (elementwise over a batched ``zeta``)."""
    out = _evaluate(expr, alg.as_a3(zeta), _A3Backend)
    shape = zeta.shape if isinstance(zeta, A3Element) else ()
    if out.shape != shape:
        out = A3Element(*(np.broadcast_to(v, shape) for v in out.components))
    return out


def jet(expr: HoloExpr, z) -> JetValue:
    """``(F(z), F'(z), F''(z))`` from a single A3 evaluation at ``z + rho``."""
    z = np.asarray(z, dtype=complex)
    e = eval_a3(expr, A3Element(z, np.ones_like(z), np.zeros_like(z)))
    return JetValue(e.a, e.b, 2 * e.c)


# -- symbolic derivative ----------------------------------------------------


def _is_zero(e):
    return isinstance(e, Const) and e.value == 0


def _is_one(e):
    return isinstance(e, Const) and e.value == 1


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return Const(0)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    return Mul(a, b)


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Add(a, b)


def _sub(a, b):
    if _is_zero(b):
        return a
    if _is_zero(a):
        return _mul(Const(-1), b)
    return Sub(a, b)


def diff(expr: HoloExpr) -> HoloExpr:
    """Symbolic complex derivative (light zero/one pruning only)."""
    if isinstance(expr, Const):
        return Const(0)
    if isinstance(expr, Var):
        return Const(1)
    if isinstance(expr, Add):
        return _add(diff(expr.left), diff(expr.right))
    if isinstance(expr, Sub):
        return _sub(diff(expr.left), diff(expr.right))
    if isinstance(expr, Mul):
        u, v = expr.left, expr.right
        return _add(_mul(diff(u), v), _mul(u, diff(v)))
    if isinstance(expr, Div):
        u, v = expr.left, expr.right
        num = _sub(_mul(diff(u), v), _mul(u, diff(v)))
        return Const(0) if _is_zero(num) else Div(num, Pow(v, 2))
    if isinstance(expr, Pow):
        k = expr.exponent
        if k == 0:
            return Const(0)
        inner = Const(1) if k == 1 else (expr.base if k == 2 else Pow(expr.base, k - 1))
        return _mul(_mul(Const(k), inner), diff(expr.base))
    if isinstance(expr, Func):
        u = expr.arg
        du = diff(u)
        outer = {
            "exp": expr,
            "sin": Func("cos", u),
            "cos": _mul(Const(-1), Func("sin", u)),
        }.get(expr.name)
        if expr.name == "log":
            return Const(0) if _is_zero(du) else Div(du, u)
        return _mul(outer, du)
    raise TypeError(f"not a HoloExpr node: {expr!r}")


# -- singularities ----------------------------------------------------------


def _poly_coeffs(expr):
    """Ascending coefficients if ``expr`` is a polynomial in z, else None."""
    P = np.polynomial.polynomial
    if isinstance(expr, Const):
        return np.array([expr.value])
    if isinstance(expr, Var):
        return np.array([0j, 1])
    if isinstance(expr, (Add, Sub, Mul)):
        left, right = _poly_coeffs(expr.left), _poly_coeffs(expr.right)
        if left is None or right is None:
            return None
        if isinstance(expr, Add):
            return P.polyadd(left, right)
        if isinstance(expr, Sub):
            return P.polysub(left, right)
        return P.polymul(left, right)
    if isinstance(expr, Pow) and expr.exponent >= 0:
        base = _poly_coeffs(expr.base)
        return None if base is None else P.polypow(base, expr.exponent)
    return None


def _walk(expr):
    yield expr
    for child in _children(expr):
        yield from _walk(child)


def _children(expr):
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return (expr.left, expr.right)
    if isinstance(expr, Pow):
        return (expr.base,)
    if isinstance(expr, Func):
        return (expr.arg,)
    return ()


def _factors(expr):
    if isinstance(expr, Mul):
        return [*_factors(expr.left), *_factors(expr.right)]
    if isinstance(expr, Pow) and expr.exponent > 0:
        return _factors(expr.base)
    return [expr]


def singularities(expr: HoloExpr) -> list[complex]:
    """Poles and log branch points that can be located in closed form.

    Only zeros of polynomial denominators, polynomial bases raised to
    negative powers, and polynomial log arguments are found.
    """
    found = []
    for node in _walk(expr):
        target = None
        if isinstance(node, Div):
            target = node.right
        elif isinstance(node, Pow) and node.exponent < 0:
            target = node.base
        elif isinstance(node, Func) and node.name == "log":
            target = node.arg
        if target is None:
            continue
        for factor in _factors(target):
            coeffs = _poly_coeffs(factor)
            if coeffs is None:
                continue
            coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
            if len(coeffs) > 1:
                found.extend(complex(r) for r in np.polynomial.polynomial.polyroots(coeffs))
    return sorted(set(found), key=lambda w: (w.real, w.imag))


def from_coefficients(coeffs) -> HoloExpr:
    """Polynomial ``sum c_k z^k`` (ascending coefficients) as a tree."""
    expr = None
    for k, c in enumerate(coeffs):
        if k == 0:
            term = Const(c)
        elif k == 1:
            term = Mul(Const(c), Z)
        else:
            term = Mul(Const(c), Pow(Z, k))
        expr = term if expr is None else Add(expr, term)
    return Const(0) if expr is None else expr


# -- printing ---------------------------------------------------------------


def _fmt_real(x: float) -> str:
    return repr(float(x))


def _fmt_const(v: complex) -> str:
    re_, im = v.real, v.imag
    if im == 0:
        s = _fmt_real(re_)
        return f"({s})" if s.startswith("-") else s
    if re_ == 0:
        s = _fmt_real(im) + "i"
        return f"({s})" if s.startswith("-") else s
    sign = "-" if np.signbit(im) else "+"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im))}i)"


def to_text(expr: HoloExpr, _top: bool = True) -> str:
    if isinstance(expr, Const):
        return _fmt_const(expr.value)
    if isinstance(expr, Var):
        return "z"
    if type(expr) in _BINARY:
        inner = f"{to_text(expr.left, False)} {_BINARY[type(expr)]} {to_text(expr.right, False)}"
        return inner if _top else f"({inner})"
    if isinstance(expr, Pow):
        base = to_text(expr.base, False)
        if isinstance(expr.base, Pow):
            base = f"({base})"
        return f"{base}^{expr.exponent}"
    if isinstance(expr, Func):
        return f"{expr.name}({to_text(expr.arg)})"
    raise TypeError(f"not a HoloExpr node: {expr!r}")


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        kind, val, pos = self.tok
        what = "end of input" if kind == "end" else f"token {val!r}"
        raise ParseError(f"unexpected {what}", pos, expected)

    def expect_op(self, op):
        if self.tok[0] == "op" and self.tok[1] == op:
            return self.advance()
        self.fail({repr(op)})

    def parse(self):
        e = self.expr()
        if self.tok[0] != "end":
            self.fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return e

    def expr(self):
        left = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            right = self.term()
            if isinstance(left, Const) and isinstance(right, Const):
                left = Const(left.value + right.value if op == "+" else left.value - right.value)
            else:
                left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self):
        left = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            operand = self.unary()
            if op == "+":
                return operand
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Mul(Const(-1), operand)
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            sign = 1
            if self.tok[0] == "op" and self.tok[1] in "+-":
                sign = -1 if self.advance()[1] == "-" else 1
            kind, val, _ = self.tok
            if kind != "num" or not val.isdigit():
                self.fail({"integer exponent"})
            self.advance()
            return Pow(base, sign * int(val))
        return base

    def primary(self):
        kind, val, pos = self.tok
        if kind == "num":
            self.advance()
            if val.endswith("i"):
                return Const(complex(0, float(val[:-1])))
            return Const(float(val))
        if kind == "name":
            if val == "z":
                self.advance()
                return Z
            if val in FUNCTIONS:
                self.advance()
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(val, arg)
            raise ParseError(f"unknown identifier {val!r}", pos, {"'z'", *FUNCTIONS})
        if kind == "op" and val == "(":
            self.advance()
            e = self.expr()
            self.expect_op(")")
            return e
        self.fail({"number", "'z'", "function", "'('", "'-'"})


def parse_expr(text: str) -> HoloExpr:
    return _Parser(text).parse()


def as_expr(obj) -> HoloExpr:
    if isinstance(obj, str):
        return parse_expr(obj)
    if isinstance(obj, (int, float, complex)):
        return Const(obj)
    return obj
