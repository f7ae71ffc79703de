"""Closed-form scalar expressions: tokenizer, recursive-descent parser, printer.

Grammar (precedence ^ > unary minus > * / > + -, ^ right-associative):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | ident | ident '(' expr ')' | '(' expr ')'

Integer literals (and hence integer/integer quotients) stay exact rationals;
decimal literals become floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

FUNCTIONS = ("exp", "log", "sin", "cos", "sinh", "cosh", "tanh", "sqrt", "abs")
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExprError(ValueError):
    """Parse or evaluation failure, carrying a byte offset when known."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)


@dataclass(frozen=True)
class Num:
    value: Union[Fraction, float]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Fun:
    name: str
    arg: "ExprAst"


ExprAst = Union[Num, Var, Const, Neg, BinOp, Fun]


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    pos: int
    value: Union[Fraction, float, None] = None


def _tokenize(text: str) -> list[_Token]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            is_float = False
            if j < n and text[j] == ".":
                is_float = True
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            value = float(lit) if is_float else Fraction(int(lit))
            toks.append(_Token("num", lit, i, value))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if c in "+-*/^(),":
            toks.append(_Token("op", c, i))
            i += 1
            continue
        raise ExprError(f"unexpected character {c!r}", i)
    toks.append(_Token("end", "", n))
    return toks


class _Parser:
    def __init__(self, tokens: list[_Token], coords: tuple[str, ...]):
        self.toks = tokens
        self.pos = 0
        self.coords = coords

    def _peek(self) -> _Token:
        return self.toks[self.pos]

    def _next(self) -> _Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def _error_offset(self, tok: _Token) -> int:
        # anchor end-of-input errors just past the last real token
        if tok.kind == "end" and self.pos > 0:
            prev = self.toks[self.pos - 1] if self.toks[self.pos - 1] is not tok else (
                self.toks[self.pos - 2] if self.pos >= 2 else tok
            )
            if prev is not tok:
                return prev.pos + len(prev.text)
        return tok.pos

    def parse(self) -> ExprAst:
        ast = self.expr()
        t = self._peek()
        if t.kind != "end":
            raise ExprError(f"unexpected {t.text!r}", t.pos)
        return ast

    def expr(self) -> ExprAst:
        node = self.term()
        while self._peek().kind == "op" and self._peek().text in "+-":
            op = self._next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self._peek().kind == "op" and self._peek().text in "*/":
            op = self._next().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        t = self._peek()
        if t.kind == "op" and t.text == "-":
            self._next()
            return Neg(self.factor())
        return self.power()

    def power(self) -> ExprAst:
        node = self.atom()
        t = self._peek()
        if t.kind == "op" and t.text == "^":
            self._next()
            node = BinOp("^", node, self.factor())
        return node

    def atom(self) -> ExprAst:
        t = self._next()
        if t.kind == "num":
            return Num(t.value)
        if t.kind == "ident":
            name = t.text
            if self._peek().kind == "op" and self._peek().text == "(":
                if name not in FUNCTIONS:
                    raise ExprError(f"unknown function {name!r}", t.pos)
                self._next()
                arg = self.expr()
                nxt = self._next()
                if nxt.kind == "op" and nxt.text == ",":
                    raise ExprError(f"function {name!r} takes exactly one argument", nxt.pos)
                if not (nxt.kind == "op" and nxt.text == ")"):
                    raise ExprError("expected ')'", self._error_offset(nxt))
                return Fun(name, arg)
            if name in self.coords:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            if name in FUNCTIONS:
                raise ExprError(f"function {name!r} requires an argument list", t.pos)
            raise ExprError(f"unknown identifier {name!r}", t.pos)
        if t.kind == "op" and t.text == "(":
            node = self.expr()
            nxt = self._next()
            if not (nxt.kind == "op" and nxt.text == ")"):
                raise ExprError("expected ')'", self._error_offset(nxt))
            return node
        raise ExprError(
            "unexpected end of input" if t.kind == "end" else f"unexpected {t.text!r}",
            self._error_offset(t),
        )


def parse(text: str, coords: list[str] | tuple[str, ...]) -> ExprAst:
    """Parse `text` over the named coordinates into an AST."""
    if not text or not text.strip():
        raise ExprError("empty expression", 0)
    names = tuple(coords)
    if len(set(names)) != len(names):
        raise ExprError("coordinate names must be distinct")
    return _Parser(_tokenize(text), names).parse()


def print_expr(ast: ExprAst) -> str:
    """Serialize an AST so that parse(print_expr(a)) is structurally equal to a.

    Output is fully parenthesized; every node maps to exactly one grammar shape.
    """
    if isinstance(ast, Num):
        v = ast.value
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return str(v.numerator)
            return f"({v.numerator}/{v.denominator})"  # reparses as a quotient of integers
        return repr(v)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Const):
        return ast.name
    if isinstance(ast, Neg):
        return f"-({print_expr(ast.arg)})"
    if isinstance(ast, BinOp):
        return f"({print_expr(ast.left)} {ast.op} {print_expr(ast.right)})"
    if isinstance(ast, Fun):
        return f"{ast.name}({print_expr(ast.arg)})"
    raise TypeError(f"not an AST node: {ast!r}")


def variables(ast: ExprAst) -> set[str]:
    if isinstance(ast, Var):
        return {ast.name}
    if isinstance(ast, Neg):
        return variables(ast.arg)
    if isinstance(ast, BinOp):
        return variables(ast.left) | variables(ast.right)
    if isinstance(ast, Fun):
        return variables(ast.arg)
    return set()


def eval_rational(ast: ExprAst) -> Fraction:
    """Exact evaluation for constant rational expressions (for weight constants).

    Floats, functions and non-integer exponents are rejected.
    """
    if isinstance(ast, Num):
        if isinstance(ast.value, Fraction):
            return ast.value
        raise ExprError("decimal literal is not an exact rational")
    if isinstance(ast, Neg):
        return -eval_rational(ast.arg)
    if isinstance(ast, BinOp):
        a = eval_rational(ast.left)
        if ast.op == "^":
            e = eval_rational(ast.right)
            if e.denominator != 1:
                raise ExprError("non-integer exponent is not rational")
            return a ** e.numerator
        b = eval_rational(ast.right)
        if ast.op == "+":
            return a + b
        if ast.op == "-":
            return a - b
        if ast.op == "*":
            return a * b
        if ast.op == "/":
            if b == 0:
                raise ExprError("division by zero")
            return a / b
        raise ExprError(f"unknown operator {ast.op!r}")
    raise ExprError("expression is not a rational constant")
