"""Tiny arithmetic expression language for problem files.

Grammar (precedence low to high; ^ is right-associative and binds tighter
than unary minus, so -x1^2 is -(x1^2)):

    expr    :=  term  (("+" | "-") term)*
    term    :=  factor (("*" | "/") factor)*
    factor  :=  "-" factor | power
    power   :=  atom ("^" factor)?
    atom    :=  NUMBER | "pi" | "e" | "inf" | NAME "(" expr ")"
              | VAR | "(" expr ")"

VAR is x1..xd (domain coordinates) or n (perturbation index). NAME is one
of sin, cos, exp, abs, sqrt. Evaluation is IEEE double: exp overflow
saturates to +inf, while NaN-producing operations (0/0, sqrt of a
negative, inf - inf) raise DomainError — no NaN ever escapes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import DomainError, ExprSyntaxError, UnboundVariable

_TOKEN = re.compile(r"""
    (?P<num>\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
  | (?P<ws>\s+)
""", re.VERBOSE)

_FUNCTIONS = ("sin", "cos", "exp", "abs", "sqrt")
_CONSTANTS = {"pi": math.pi, "e": math.e, "inf": math.inf}
_VAR = re.compile(r"^(x[1-9][0-9]*|n)$")


@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Var, Neg, Call, BinOp]


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.src))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.take()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind is not None:
            raise ExprSyntaxError(f"trailing input {text!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                e = BinOp(text, e, self.term())
            else:
                return e

    def term(self) -> Expr:
        e = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                e = BinOp(text, e, self.factor())
            else:
                return e

    def factor(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Lit(float(text))
        if kind == "name":
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg)
            if text in _CONSTANTS:
                return Lit(_CONSTANTS[text])
            if _VAR.match(text):
                return Var(text)
            raise ExprSyntaxError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(
            f"expected a value, got {text!r}" if kind else "unexpected end of input", pos)


def parse(src: str) -> Expr:
    if not isinstance(src, str) or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


def unparse(e: Expr) -> str:
    """Canonical text form; parse(unparse(e)) equals e structurally.

    Holds for every AST the parser itself can produce (the parser never
    emits a negative Lit, so hand-built Lit(-2.0) nodes round-trip to the
    equivalent Neg form instead).
    """
    return _unparse(e, 0)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _unparse(e: Expr, ctx: int) -> str:
    if isinstance(e, Lit):
        if e.value == math.inf:
            return "inf"
        if e.value == math.pi:
            return "pi"
        if e.value == math.e:
            return "e"
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({_unparse(e.arg, 0)})"
    if isinstance(e, Neg):
        s = "-" + _unparse(e.arg, _PREC["neg"])
        return f"({s})" if _PREC["neg"] < ctx else s
    p = _PREC[e.op]
    if e.op == "^":
        # right-assoc: chain rightward without parens, re-wrap a ^ on the left
        s = f"{_unparse(e.left, p + 1)}^{_unparse(e.right, p)}"
    else:
        s = f"{_unparse(e.left, p)} {e.op} {_unparse(e.right, p + 1)}"
    return f"({s})" if p < ctx else s


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.arg)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return set()


def evaluate(e: Expr, env: Mapping[str, object]) -> float:
    """env binds 'x' to a coordinate sequence and optionally 'n' to an int."""
    v = _eval(e, env)
    if math.isnan(v):
        raise DomainError(f"expression produced NaN: {unparse(e)}")
    return v


def _eval(e: Expr, env: Mapping[str, object]) -> float:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        if e.name == "n":
            n = env.get("n")
            if n is None:
                raise UnboundVariable("expression uses n outside a perturbation family")
            return float(n)
        x = env.get("x")
        idx = int(e.name[1:]) - 1
        if x is None or idx >= len(x):
            raise UnboundVariable(f"variable {e.name} not bound (domain has "
                                  f"{0 if x is None else len(x)} coordinates)")
        return float(x[idx])
    if isinstance(e, Neg):
        return -_eval(e.arg, env)
    if isinstance(e, Call):
        a = _eval(e.arg, env)
        if e.func in ("sin", "cos"):
            if math.isinf(a):
                raise DomainError(f"{e.func} of an infinite argument")
            return math.sin(a) if e.func == "sin" else math.cos(a)
        if e.func == "exp":
            if a > 700.0:
                return math.inf   # saturating overflow contract
            return math.exp(a)
        if e.func == "abs":
            return abs(a)
        if e.func == "sqrt":
            if a < 0:
                raise DomainError(f"sqrt of a negative number ({a})")
            return math.sqrt(a)
        raise DomainError(f"unknown function {e.func}")  # pragma: no cover
    a = _eval(e.left, env)
    b = _eval(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b
    if e.op == "^":
        try:
            v = math.pow(a, b)
        except OverflowError:
            return math.inf if a > 1 else 0.0
        except ValueError:
            raise DomainError(f"invalid power {a} ^ {b}") from None
        return v
    raise DomainError(f"unknown operator {e.op}")  # pragma: no cover
