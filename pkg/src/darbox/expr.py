"""Scalar expressions over variables x1..xn: parsing, point evaluation,
and interval evaluation.

Grammar (whitespace-insensitive)::

    expr   := term  (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds tightest
    atom   := NUMBER | 'pi' | VARIABLE | FUNC '(' expr ')' | '(' expr ')'
    FUNC   := 'neg' | 'abs' | 'sin' | 'cos' | 'exp' | 'log' | 'sqrt'

Variables are x1..xn; x, y, z alias x1, x2, x3 when the declared dimension
is at most 3.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import intervals as iv
from .bounds import Enclosure
from .errors import (
    ExprDimensionError,
    ExprDomainError,
    ExprSyntaxError,
    UnboundedFunctionError,
)
from .geometry import Rectangle
from .intervals import Interval

__all__ = [
    "Const", "Var", "Unary", "Binary", "Expr", "parse", "eval_point",
    "interval_eval", "to_text", "IntervalOracle", "interval_oracle",
]


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based axis


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


Node = Union[Const, Var, Unary, Binary]

_FUNCTIONS = {"neg", "abs", "sin", "cos", "exp", "log", "sqrt"}
_ALIASES = {"x": 0, "y": 1, "z": 2}
_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")
_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Expr:
    """A parsed expression together with its declared dimension."""

    root: Node
    dim: int

    def __call__(self, point: Sequence[float]) -> float:
        return eval_point(self, point)

    def interval(self, box: Rectangle) -> Interval:
        return interval_eval(self, box)

    def to_text(self) -> str:
        return to_text(self.root)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, src: str, dim: int):
        self.src = src
        self.dim = dim
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(src):
            m = _TOKEN_RE.match(src, pos)
            if m is None or m.end() == pos:
                at = pos + len(src[pos:]) - len(src[pos:].lstrip())
                raise ExprSyntaxError(f"unexpected character {src[at]!r}", at)
            if m.group("num") is not None:
                self.tokens.append(("num", m.group("num"), m.start("num")))
            elif m.group("ident") is not None:
                self.tokens.append(("ident", m.group("ident"), m.start("ident")))
            else:
                self.tokens.append(("op", m.group("op"), m.start("op")))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ExprSyntaxError(f"expected '{op}'", pos)
        self.advance()

    def parse(self) -> Node:
        node = self.parse_expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected '{text}'", pos)
        return node

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                node = Binary(text, node, self.parse_term())
            else:
                return node

    def parse_term(self) -> Node:
        node = self.parse_unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                node = Binary(text, node, self.parse_unary())
            else:
                return node

    def parse_unary(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Unary("neg", self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return Binary("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Node:
        kind, text, pos = self.advance()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Unary(text, arg)
            return self.resolve_variable(text, pos)
        if kind == "op" and text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        shown = text if text else "end of input"
        raise ExprSyntaxError(f"unexpected '{shown}'", pos)

    def resolve_variable(self, name: str, pos: int) -> Node:
        if name == "pi":
            return Const(math.pi)
        if name in _ALIASES and self.dim <= 3:
            index = _ALIASES[name]
            if index >= self.dim:
                raise ExprDimensionError(name, self.dim, pos)
            return Var(index)
        m = _VAR_RE.match(name)
        if m:
            index = int(m.group(1)) - 1
            if index >= self.dim:
                raise ExprDimensionError(name, self.dim, pos)
            return Var(index)
        raise ExprSyntaxError(f"unknown identifier '{name}'", pos)


def parse(src: str, dim: int) -> Expr:
    """Parse ``src`` into an Expr over ``dim`` variables."""
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    return Expr(_Parser(src, dim).parse(), dim)


# ---------------------------------------------------------------------------
# Point evaluation
# ---------------------------------------------------------------------------

def _pow_point(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0.0:
        raise ExprDomainError("zero base with negative exponent", "^")
    if base < 0.0 and not float(exponent).is_integer():
        raise ExprDomainError("fractional power of a negative base", "^")
    try:
        return base ** exponent
    except OverflowError:
        return math.inf


def _eval(node: Node, point: Sequence[float]) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return point[node.index]
    if isinstance(node, Unary):
        v = _eval(node.arg, point)
        op = node.op
        if op == "neg":
            return -v
        if op == "abs":
            return abs(v)
        if op == "sin":
            return math.sin(v)
        if op == "cos":
            return math.cos(v)
        if op == "exp":
            try:
                return math.exp(v)
            except OverflowError:
                return math.inf
        if op == "log":
            if v <= 0.0:
                raise ExprDomainError(f"log of non-positive value {v}", "log")
            return math.log(v)
        if op == "sqrt":
            if v < 0.0:
                raise ExprDomainError(f"sqrt of negative value {v}", "sqrt")
            return math.sqrt(v)
        raise ValueError(f"unknown unary op {op!r}")
    l = _eval(node.left, point)
    r = _eval(node.right, point)
    op = node.op
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if op == "/":
        if r == 0.0:
            raise ExprDomainError("division by zero", "/")
        return l / r
    if op == "^":
        return _pow_point(l, r)
    raise ValueError(f"unknown binary op {op!r}")


def eval_point(e: Expr, point: Sequence[float]) -> float:
    if len(point) != e.dim:
        raise ValueError(f"point has dimension {len(point)}, expected {e.dim}")
    return _eval(e.root, point)


# ---------------------------------------------------------------------------
# Interval evaluation (scalar)
# ---------------------------------------------------------------------------

_UNARY_IV = {
    "neg": iv.neg,
    "abs": iv.absolute,
    "sin": iv.sin_,
    "cos": iv.cos_,
    "exp": iv.exp_,
    "log": iv.log_,
    "sqrt": iv.sqrt_,
}


def _ieval(node: Node, box: Rectangle) -> Interval:
    if isinstance(node, Const):
        return iv.from_value(node.value)
    if isinstance(node, Var):
        return Interval(box.lower[node.index], box.upper[node.index])
    if isinstance(node, Unary):
        return _UNARY_IV[node.op](_ieval(node.arg, box))
    left = _ieval(node.left, box)
    op = node.op
    if op == "^" and isinstance(node.right, Const):
        y = node.right.value
        if float(y).is_integer():
            return iv.pow_int(left, int(y))
        return iv.pow_real(left, y)
    right = _ieval(node.right, box)
    if op == "+":
        return iv.add(left, right)
    if op == "-":
        return iv.sub(left, right)
    if op == "*":
        return iv.mul(left, right)
    if op == "/":
        return iv.div(left, right)
    if op == "^":
        return iv.power(left, right)
    raise ValueError(f"unknown binary op {op!r}")


def interval_eval(e: Expr, box: Rectangle) -> Interval:
    """An interval containing the range of ``e`` over ``box``."""
    if box.dim != e.dim:
        raise ValueError(f"box has dimension {box.dim}, expected {e.dim}")
    return _ieval(e.root, box)


# ---------------------------------------------------------------------------
# Interval evaluation (vectorized over arrays of boxes)
# ---------------------------------------------------------------------------

_UNARY_BATCH = {
    "neg": iv.bneg,
    "abs": iv.babs,
    "sin": iv.bsin,
    "cos": iv.bcos,
    "exp": iv.bexp,
    "log": iv.blog,
    "sqrt": iv.bsqrt,
}

_BINARY_BATCH = {"+": iv.badd, "-": iv.bsub, "*": iv.bmul, "/": iv.bdiv}


def _beval(node: Node, los: np.ndarray, his: np.ndarray):
    if isinstance(node, Const):
        n = los.shape[0]
        c = np.full(n, node.value)
        return c, c
    if isinstance(node, Var):
        return los[:, node.index], his[:, node.index]
    if isinstance(node, Unary):
        alo, ahi = _beval(node.arg, los, his)
        return _UNARY_BATCH[node.op](alo, ahi)
    alo, ahi = _beval(node.left, los, his)
    op = node.op
    if op == "^" and isinstance(node.right, Const):
        y = node.right.value
        if float(y).is_integer():
            return iv.bpow_int(alo, ahi, int(y))
        return iv.bpow_real(alo, ahi, y)
    blo, bhi = _beval(node.right, los, his)
    if op == "^":
        llo, lhi = iv.blog(alo, ahi)
        mlo, mhi = iv.bmul(blo, bhi, llo, lhi)
        return iv.bexp(mlo, mhi)
    return _BINARY_BATCH[op](alo, ahi, blo, bhi)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}
_ATOM_PREC = 5


def _fmt(node: Node) -> tuple[str, int]:
    if isinstance(node, Const):
        return format(node.value, ".17g"), _ATOM_PREC
    if isinstance(node, Var):
        return f"x{node.index + 1}", _ATOM_PREC
    if isinstance(node, Unary):
        if node.op == "neg":
            text, prec = _fmt(node.arg)
            if prec < _PREC["neg"]:
                text = f"({text})"
            return f"-{text}", _PREC["neg"]
        text, _ = _fmt(node.arg)
        return f"{node.op}({text})", _ATOM_PREC
    prec = _PREC[node.op]
    ltext, lprec = _fmt(node.left)
    rtext, rprec = _fmt(node.right)
    if node.op == "^":
        if lprec <= prec:
            ltext = f"({ltext})"
        if rprec < prec:
            rtext = f"({rtext})"
    else:
        if lprec < prec:
            ltext = f"({ltext})"
        if rprec <= prec:
            rtext = f"({rtext})"
    return f"{ltext}{node.op}{rtext}", prec


def to_text(node: Node) -> str:
    """Render a tree so that reparsing yields a structurally identical tree."""
    return _fmt(node)[0]


# ---------------------------------------------------------------------------
# Rigorous oracle backed by interval evaluation
# ---------------------------------------------------------------------------

class IntervalOracle:
    """Bound oracle for an expression via its natural interval extension.

    Domain violations during interval evaluation (division by an interval
    containing zero, log or sqrt outside their domain) are reported as an
    unbounded function, which is what they mean for bracketing purposes.
    """

    rigorous = True

    def __init__(self, e: Expr):
        self.expr = e

    def __call__(self, rect: Rectangle) -> Enclosure:
        try:
            result = interval_eval(self.expr, rect)
        except ExprDomainError as exc:
            raise UnboundedFunctionError(f"unbounded: {exc}") from exc
        if not result.is_finite():
            raise UnboundedFunctionError(
                f"unbounded: enclosure [{result.lo}, {result.hi}] is not finite"
            )
        return Enclosure(result.lo, result.hi, rigorous=True)

    def enclose_batch(self, los: np.ndarray, his: np.ndarray):
        """Vectorized enclosures for boxes given as (N, n) lo/hi arrays.

        Cells with domain violations come back as +-inf; callers raise
        UnboundedFunctionError on any non-finite entry.
        """
        lo, hi = _beval(self.expr.root, los, his)
        lo = np.broadcast_to(lo, (los.shape[0],)).astype(float, copy=True)
        hi = np.broadcast_to(hi, (los.shape[0],)).astype(float, copy=True)
        return lo, hi


def interval_oracle(e: Expr | str, dim: int | None = None) -> IntervalOracle:
    if isinstance(e, str):
        if dim is None:
            raise ValueError("dim is required when passing expression text")
        e = parse(e, dim)
    return IntervalOracle(e)


def as_callable(e: Expr) -> Callable[[Sequence[float]], float]:
    """Plain point-evaluation closure for use as a black-box integrand."""
    return lambda point: eval_point(e, point)
