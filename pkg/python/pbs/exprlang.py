"""Expression language for superpotentials.

Grammar (one free variable ``x``, imaginary unit ``i``)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom ("^" ["-" | "+"] INTEGER)?
    atom   := NUMBER | "x" | "i" | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := exp | sin | cos | sinh | cosh | sqrt | log

Expressions are immutable trees. ``differentiate`` and ``conjugate`` are
exact tree transformations; ``evaluate`` works pointwise in complex double
precision on scalars or numpy arrays.
"""

# pylint: disable=invalid-name,too-many-return-statements
# pyright: reportUnusedFunction=false
# flake8: noqa: N802

from __future__ import annotations

import logging
import re
from collections.abc import Iterator
from dataclasses import dataclass
from functools import singledispatch
from typing import Final, Union, overload

import numpy as np
import numpy.typing as npt

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]

FUNCTIONS: Final = ("exp", "sin", "cos", "sinh", "cosh", "sqrt", "log")

_NUMPY_FUNCS: Final = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "sqrt": np.sqrt,
    "log": np.log,
}

# Integer and decimal literals, optional exponent; names; single-char operators.
_TOKEN_RE = re.compile(
    r"(?:"
    r"(?P<number>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)
_INT_RE = re.compile(r"^[0-9]+\Z")


class ExprSyntaxError(ValueError):
    """Malformed expression text."""

    def __init__(self, message: str, position: int) -> None:
        """Record the offending position."""
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprDomainError(ValueError):
    """Evaluation hit a singular point (division by zero, log of zero)."""


class Expr:
    """Base node. Arithmetic operators build (lightly folded) trees."""

    __slots__ = ()

    def __add__(self, other: ExprLike) -> Expr:
        return add(self, as_expr(other))

    def __radd__(self, other: ExprLike) -> Expr:
        return add(as_expr(other), self)

    def __sub__(self, other: ExprLike) -> Expr:
        return sub(self, as_expr(other))

    def __rsub__(self, other: ExprLike) -> Expr:
        return sub(as_expr(other), self)

    def __mul__(self, other: ExprLike) -> Expr:
        return mul(self, as_expr(other))

    def __rmul__(self, other: ExprLike) -> Expr:
        return mul(as_expr(other), self)

    def __truediv__(self, other: ExprLike) -> Expr:
        return div(self, as_expr(other))

    def __rtruediv__(self, other: ExprLike) -> Expr:
        return div(as_expr(other), self)

    def __pow__(self, exponent: int) -> Expr:
        return power(self, exponent)

    def __neg__(self) -> Expr:
        return neg(self)

    def __str__(self) -> str:
        return to_text(self)

    def operands(self) -> tuple[Expr, ...]:
        """Child nodes."""
        return ()


ExprLike = Union[Expr, complex, float, int]


@dataclass(frozen=True, slots=True)
class Const(Expr):
    """Complex scalar constant."""

    value: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """The variable x."""


@dataclass(frozen=True, slots=True)
class Add(Expr):
    """left + right."""

    left: Expr
    right: Expr

    def operands(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    """left - right."""

    left: Expr
    right: Expr

    def operands(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    """left * right."""

    left: Expr
    right: Expr

    def operands(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Div(Expr):
    """left / right."""

    left: Expr
    right: Expr

    def operands(self) -> tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    """base ^ exponent, exponent an integer literal."""

    base: Expr
    exponent: int

    def operands(self) -> tuple[Expr, ...]:
        return (self.base,)


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    """-operand."""

    operand: Expr

    def operands(self) -> tuple[Expr, ...]:
        return (self.operand,)


@dataclass(frozen=True, slots=True)
class Func(Expr):
    """Unary elementary function."""

    name: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")

    def operands(self) -> tuple[Expr, ...]:
        return (self.arg,)


X: Final = Var()
ZERO: Final = Const(0)
ONE: Final = Const(1)


def as_expr(value: ExprLike) -> Expr:
    """Wrap numbers as constants."""
    if isinstance(value, Expr):
        return value
    return Const(complex(value))


def _is_const(e: Expr, value: complex | None = None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


# Folding constructors: constants only, no algebraic rewriting.


def add(a: Expr, b: Expr) -> Expr:
    """a + b."""
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    """a - b."""
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is_const(b, 0):
        return a
    if _is_const(a, 0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    """a * b."""
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    """a / b."""
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0:
        return Const(a.value / b.value)
    if _is_const(a, 0) and not _is_const(b, 0):
        return ZERO
    if _is_const(b, 1):
        return a
    return Div(a, b)


def power(base: Expr, exponent: int) -> Expr:
    """base ^ exponent."""
    if not isinstance(exponent, int) or isinstance(exponent, bool):
        raise TypeError("exponent must be an int")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const) and (base.value != 0 or exponent > 0):
        return Const(_int_power(np.complex128(base.value), exponent).item())
    return Pow(base, exponent)


def neg(a: Expr) -> Expr:
    """-a."""
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def func(name: str, arg: ExprLike) -> Expr:
    """name(arg)."""
    return Func(name, as_expr(arg))


def exp(arg: ExprLike) -> Expr:
    """exp(arg)."""
    return func("exp", arg)


def sin(arg: ExprLike) -> Expr:
    """sin(arg)."""
    return func("sin", arg)


def cos(arg: ExprLike) -> Expr:
    """cos(arg)."""
    return func("cos", arg)


def iter_nodes(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.operands()))


# --------------------------------------------------------------------------
# parsing


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    end = len(source)
    while pos < end:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup or ""
        tokens.append(_Token(kind, m.group(kind), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    """Recursive-descent parser over the token list."""

    def __init__(self, source: str) -> None:
        self._tokens = _tokenize(source)
        self._i = 0

    @property
    def _tok(self) -> _Token:
        return self._tokens[self._i]

    def _advance(self) -> _Token:
        tok = self._tokens[self._i]
        self._i += 1
        return tok

    def _expect_op(self, text: str) -> None:
        tok = self._tok
        if tok.kind != "op" or tok.text != text:
            found = tok.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", tok.pos)
        self._advance()

    def parse(self) -> Expr:
        e = self._expr()
        if self._tok.kind != "end":
            raise ExprSyntaxError(f"unexpected {self._tok.text!r}", self._tok.pos)
        return e

    def _expr(self) -> Expr:
        left = self._term()
        while self._tok.kind == "op" and self._tok.text in "+-":
            op = self._advance().text
            right = self._term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def _term(self) -> Expr:
        left = self._unary()
        while self._tok.kind == "op" and self._tok.text in "*/":
            op = self._advance().text
            right = self._unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def _unary(self) -> Expr:
        if self._tok.kind == "op" and self._tok.text in "+-":
            op = self._advance().text
            operand = self._unary()
            return Neg(operand) if op == "-" else operand
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self._tok.kind == "op" and self._tok.text == "^":
            caret = self._advance()
            sign = 1
            if self._tok.kind == "op" and self._tok.text in "+-":
                sign = -1 if self._advance().text == "-" else 1
            tok = self._tok
            if tok.kind != "number" or not _INT_RE.match(tok.text):
                raise ExprSyntaxError(
                    "exponent of '^' must be an integer literal", caret.pos
                )
            self._advance()
            return Pow(base, sign * int(tok.text))
        return base

    def _atom(self) -> Expr:
        tok = self._tok
        if tok.kind == "number":
            self._advance()
            return Const(float(tok.text))
        if tok.kind == "name":
            self._advance()
            if tok.text == "x":
                return X
            if tok.text == "i":
                return Const(1j)
            if tok.text in FUNCTIONS:
                self._expect_op("(")
                arg = self._expr()
                self._expect_op(")")
                return Func(tok.text, arg)
            raise ExprSyntaxError(f"unknown symbol {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self._advance()
            inner = self._expr()
            self._expect_op(")")
            return inner
        found = tok.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", tok.pos)


def parse(source: str) -> Expr:
    """Parse expression text into a tree."""
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# printing

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _real_text(value: float) -> tuple[str, int]:
    if value < 0 or (value == 0 and np.signbit(value)):
        return f"-{-value!r}", _PREC_NEG
    return repr(value), _PREC_ATOM


def _const_text(value: complex) -> tuple[str, int]:
    re_part, im_part = value.real, value.imag
    if im_part == 0:
        return _real_text(re_part)
    if im_part == 1:
        imag_text, imag_prec = "i", _PREC_ATOM
    elif im_part == -1:
        imag_text, imag_prec = "-i", _PREC_NEG
    else:
        mag, _ = _real_text(abs(im_part))
        imag_text = f"{mag} * i" if im_part > 0 else f"-{mag} * i"
        imag_prec = _PREC_MUL if im_part > 0 else _PREC_NEG
    if re_part == 0 and not np.signbit(re_part):
        return imag_text, imag_prec
    real_text, _ = _real_text(re_part)
    if imag_text.startswith("-"):
        return f"({real_text} - {imag_text[1:]})", _PREC_ATOM
    return f"({real_text} + {imag_text})", _PREC_ATOM


def _wrap(text: str, prec: int, needed: int) -> str:
    return f"({text})" if prec < needed else text


def _text(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return "x", _PREC_ATOM
    if isinstance(e, Func):
        inner, _ = _text(e.arg)
        return f"{e.name}({inner})", _PREC_ATOM
    if isinstance(e, Pow):
        base, prec = _text(e.base)
        return f"{_wrap(base, prec, _PREC_ATOM)}^{e.exponent}", _PREC_POW
    if isinstance(e, Neg):
        inner, prec = _text(e.operand)
        return f"-{_wrap(inner, prec, _PREC_POW)}", _PREC_NEG
    if isinstance(e, (Add, Sub, Mul, Div)):
        own = _PREC_ADD if isinstance(e, (Add, Sub)) else _PREC_MUL
        symbol = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
        left, lp = _text(e.left)
        right, rp = _text(e.right)
        # right operand of equal precedence keeps its parentheses so that
        # re-parsing reproduces the same evaluation order
        return f"{_wrap(left, lp, own)} {symbol} {_wrap(right, rp, own + 1)}", own
    raise TypeError(f"not an expression node: {type(e).__name__}")


def to_text(e: Expr) -> str:
    """Canonical text; ``parse(to_text(e))`` evaluates identically to ``e``."""
    return _text(e)[0]


# --------------------------------------------------------------------------
# differentiation


@singledispatch
def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to x."""
    raise TypeError(f"cannot differentiate {type(e).__name__}")


@differentiate.register
def _(e: Const) -> Expr:
    return ZERO


@differentiate.register
def _(e: Var) -> Expr:
    return ONE


@differentiate.register
def _(e: Add) -> Expr:
    return add(differentiate(e.left), differentiate(e.right))


@differentiate.register
def _(e: Sub) -> Expr:
    return sub(differentiate(e.left), differentiate(e.right))


@differentiate.register
def _(e: Neg) -> Expr:
    return neg(differentiate(e.operand))


@differentiate.register
def _(e: Mul) -> Expr:
    return add(
        mul(differentiate(e.left), e.right), mul(e.left, differentiate(e.right))
    )


@differentiate.register
def _(e: Div) -> Expr:
    numerator = sub(
        mul(differentiate(e.left), e.right), mul(e.left, differentiate(e.right))
    )
    return div(numerator, power(e.right, 2))


@differentiate.register
def _(e: Pow) -> Expr:
    if e.exponent == 0:
        return ZERO
    outer = mul(Const(e.exponent), power(e.base, e.exponent - 1))
    return mul(outer, differentiate(e.base))


@differentiate.register
def _(e: Func) -> Expr:
    u = e.arg
    du = differentiate(u)
    if e.name == "exp":
        outer: Expr = e
    elif e.name == "sin":
        outer = Func("cos", u)
    elif e.name == "cos":
        outer = neg(Func("sin", u))
    elif e.name == "sinh":
        outer = Func("cosh", u)
    elif e.name == "cosh":
        outer = Func("sinh", u)
    elif e.name == "sqrt":
        outer = div(ONE, mul(Const(2), e))
    else:  # log
        outer = div(ONE, u)
    return mul(outer, du)


# --------------------------------------------------------------------------
# conjugation


@singledispatch
def conjugate(e: Expr) -> Expr:
    """Expression whose value at real x is the conjugate of ``e``'s value."""
    raise TypeError(f"cannot conjugate {type(e).__name__}")


@conjugate.register
def _(e: Const) -> Expr:
    return Const(e.value.conjugate())


@conjugate.register
def _(e: Var) -> Expr:
    return e


@conjugate.register(Add)
@conjugate.register(Sub)
@conjugate.register(Mul)
@conjugate.register(Div)
def _(e: Add | Sub | Mul | Div) -> Expr:
    return type(e)(conjugate(e.left), conjugate(e.right))


@conjugate.register
def _(e: Pow) -> Expr:
    return Pow(conjugate(e.base), e.exponent)


@conjugate.register
def _(e: Neg) -> Expr:
    return Neg(conjugate(e.operand))


@conjugate.register
def _(e: Func) -> Expr:
    # every grammar function commutes with conjugation off its branch cut
    return Func(e.name, conjugate(e.arg))


# --------------------------------------------------------------------------
# evaluation


def _int_power(base: ComplexArray | np.complex128, n: int) -> ComplexArray:
    if n < 0:
        if np.any(base == 0):
            raise ExprDomainError("zero raised to a negative power")
        return np.asarray(1.0 / _int_power(base, -n))
    result = np.ones_like(base, dtype=np.complex128)
    factor = np.asarray(base, dtype=np.complex128)
    while n:
        if n & 1:
            result = result * factor
        n >>= 1
        if n:
            factor = factor * factor
    return np.asarray(result)


@singledispatch
def _eval(e: Expr, x: ComplexArray) -> ComplexArray:
    raise TypeError(f"cannot evaluate {type(e).__name__}")


@_eval.register
def _(e: Const, x: ComplexArray) -> ComplexArray:
    return np.full(x.shape, e.value, dtype=np.complex128)


@_eval.register
def _(e: Var, x: ComplexArray) -> ComplexArray:
    return x


@_eval.register
def _(e: Add, x: ComplexArray) -> ComplexArray:
    return _eval(e.left, x) + _eval(e.right, x)


@_eval.register
def _(e: Sub, x: ComplexArray) -> ComplexArray:
    return _eval(e.left, x) - _eval(e.right, x)


@_eval.register
def _(e: Mul, x: ComplexArray) -> ComplexArray:
    return _eval(e.left, x) * _eval(e.right, x)


@_eval.register
def _(e: Div, x: ComplexArray) -> ComplexArray:
    den = _eval(e.right, x)
    if np.any(den == 0):
        raise ExprDomainError(f"division by zero in {to_text(e)}")
    return _eval(e.left, x) / den


@_eval.register
def _(e: Pow, x: ComplexArray) -> ComplexArray:
    return _int_power(_eval(e.base, x), e.exponent)


@_eval.register
def _(e: Neg, x: ComplexArray) -> ComplexArray:
    return -_eval(e.operand, x)


@_eval.register
def _(e: Func, x: ComplexArray) -> ComplexArray:
    arg = _eval(e.arg, x)
    if e.name == "log" and np.any(arg == 0):
        raise ExprDomainError(f"log of zero in {to_text(e)}")
    return np.asarray(_NUMPY_FUNCS[e.name](arg), dtype=np.complex128)


@overload
def evaluate(e: Expr, x: complex | float) -> complex: ...


@overload
def evaluate(e: Expr, x: npt.ArrayLike) -> ComplexArray: ...


def evaluate(e: Expr, x: npt.ArrayLike | complex | float) -> ComplexArray | complex:
    """Evaluate at a point or on an array of points (complex double precision)."""
    arr = np.asarray(x, dtype=np.complex128)
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        out = _eval(e, arr)
    if arr.ndim == 0:
        return complex(out)
    return np.array(np.broadcast_to(out, arr.shape))


def finite_difference(e: Expr, x: npt.ArrayLike, h: float = 1e-5) -> ComplexArray:
    """Centered difference (e(x+h) - e(x-h)) / 2h."""
    arr = np.asarray(x, dtype=np.complex128)
    return (evaluate(e, arr + h) - evaluate(e, arr - h)) / (2.0 * h)


def branch_cut_exposed(e: Expr, xs: npt.ArrayLike) -> bool:
    """True when a sqrt/log argument reaches the non-positive real axis on xs."""
    exposed = False
    for node in iter_nodes(e):
        if isinstance(node, Func) and node.name in {"sqrt", "log"}:
            arg = evaluate(node.arg, xs)
            on_cut = (arg.real <= 0) & (np.abs(arg.imag) <= 1e-12 * np.abs(arg))
            if np.any(on_cut):
                logger.warning("branch cut of %s exercised on sample points", node.name)
                exposed = True
    return exposed
