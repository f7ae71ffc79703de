"""Forward-mode jets: a scalar value with its partial derivatives up to order 3.

All derivative tensors are dense numpy arrays, symmetric in their indices.
Arithmetic propagates derivatives by exact chain/Leibniz rules, so there is
no truncation error beyond float64 rounding.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .expr import BinOp, Const, ExprAst, ExprError, Fun, Neg, Num, Var, CONSTANTS

MAX_ORDER = 3


class JetOrderError(ValueError):
    """Raised when a computation would need derivatives beyond MAX_ORDER."""


class DomainError(ValueError):
    """Function evaluated outside its smooth domain (log of <=0, abs at 0, ...)."""


def _sym3(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    # sum over which slot carries the first-derivative factor: h_ij g_k symmetrized
    a = h[:, :, None] * g[None, None, :]
    return a + a.transpose(0, 2, 1) + a.transpose(2, 0, 1)


class Jet:
    __slots__ = ("n", "order", "value", "grad", "hess", "third")

    def __init__(self, n, order, value, grad=None, hess=None, third=None):
        self.n = n
        self.order = order
        self.value = float(value)
        self.grad = grad
        self.hess = hess
        self.third = third

    # --- constructors -----------------------------------------------------

    @staticmethod
    def constant(c, n: int, order: int) -> "Jet":
        g = np.zeros(n) if order >= 1 else None
        h = np.zeros((n, n)) if order >= 2 else None
        t = np.zeros((n, n, n)) if order >= 3 else None
        return Jet(n, order, float(c), g, h, t)

    @staticmethod
    def coordinate(i: int, value: float, n: int, order: int) -> "Jet":
        j = Jet.constant(value, n, order)
        if order >= 1:
            j.grad = np.zeros(n)
            j.grad[i] = 1.0
        return j

    def truncated(self, order: int) -> "Jet":
        if order > self.order:
            raise JetOrderError(f"jet of order {self.order} cannot supply order {order}")
        if order == self.order:
            return self
        return Jet(
            self.n,
            order,
            self.value,
            self.grad if order >= 1 else None,
            self.hess if order >= 2 else None,
            self.third if order >= 3 else None,
        )

    def derivative(self, i: int) -> "Jet":
        """The jet of the partial derivative d/dx_i, one order lower."""
        if self.order < 1:
            raise JetOrderError("order 0 jet has no derivative information")
        return Jet(
            self.n,
            self.order - 1,
            self.grad[i],
            self.hess[i] if self.order >= 2 else None,
            self.third[i] if self.order >= 3 else None,
            None,
        )

    # --- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(float(other), self.n, self.order)

    def __neg__(self) -> "Jet":
        return Jet(
            self.n,
            self.order,
            -self.value,
            None if self.grad is None else -self.grad,
            None if self.hess is None else -self.hess,
            None if self.third is None else -self.third,
        )

    def __add__(self, other) -> "Jet":
        o = self._coerce(other)
        k = min(self.order, o.order)
        return Jet(
            self.n,
            k,
            self.value + o.value,
            self.grad + o.grad if k >= 1 else None,
            self.hess + o.hess if k >= 2 else None,
            self.third + o.third if k >= 3 else None,
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return (-self) + self._coerce(other)

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = float(other)
            return Jet(
                self.n,
                self.order,
                c * self.value,
                None if self.grad is None else c * self.grad,
                None if self.hess is None else c * self.hess,
                None if self.third is None else c * self.third,
            )
        o = other
        k = min(self.order, o.order)
        u, v = self, o
        val = u.value * v.value
        g = h = t = None
        if k >= 1:
            g = u.grad * v.value + v.grad * u.value
        if k >= 2:
            h = (
                u.hess * v.value
                + v.hess * u.value
                + np.outer(u.grad, v.grad)
                + np.outer(v.grad, u.grad)
            )
        if k >= 3:
            t = u.third * v.value + v.third * u.value + _sym3(u.hess, v.grad) + _sym3(v.hess, u.grad)
        return Jet(self.n, k, val, g, h, t)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self * (1.0 / float(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        t = self.value
        if t == 0.0:
            raise DomainError("division by zero in jet arithmetic")
        return self.apply(1.0 / t, -1.0 / t**2, 2.0 / t**3, -6.0 / t**4)

    def apply(self, f0: float, f1: float = 0.0, f2: float = 0.0, f3: float = 0.0) -> "Jet":
        """Chain rule for a smooth univariate f with given derivatives at self.value."""
        k = self.order
        g = h = t = None
        if k >= 1:
            g = f1 * self.grad
        if k >= 2:
            h = f2 * np.outer(self.grad, self.grad) + f1 * self.hess
        if k >= 3:
            gg = self.grad
            t = (
                f3 * gg[:, None, None] * gg[None, :, None] * gg[None, None, :]
                + f2 * _sym3(self.hess, gg)
                + f1 * self.third
            )
        return Jet(self.n, k, f0, g, h, t)

    def __pow__(self, c) -> "Jet":
        return self.pow_const(c)

    def pow_const(self, c) -> "Jet":
        """self**c for a constant exponent, exact at integer c."""
        t = self.value
        if isinstance(c, Fraction) and c.denominator == 1:
            c = c.numerator
        if isinstance(c, float) and c.is_integer():
            c = int(c)
        if isinstance(c, int):
            if c == 0:
                return Jet.constant(1.0, self.n, self.order)
            if t == 0.0 and c < 0:
                raise DomainError("zero raised to a negative power")

            def p(e):
                if t == 0.0:
                    return 0.0 if e > 0 else (1.0 if e == 0 else 0.0)
                return t**e

            def term(coef, e):
                # never evaluate t**e under a vanishing coefficient; for
                # subnormal t the power itself can overflow
                return 0.0 if coef == 0 else coef * p(e)

            return self.apply(p(c), term(c, c - 1), term(c * (c - 1), c - 2),
                              term(c * (c - 1) * (c - 2), c - 3))
        cf = float(c)
        if t <= 0.0:
            raise DomainError(f"non-integer power of non-positive base {t}")
        f0 = t**cf
        f1 = cf * t ** (cf - 1)
        f2 = cf * (cf - 1) * t ** (cf - 2)
        f3 = cf * (cf - 1) * (cf - 2) * t ** (cf - 3)
        return self.apply(f0, f1, f2, f3)


def _fn_exp(t):
    e = math.exp(t)
    return e, e, e, e


def _fn_log(t):
    if t <= 0.0:
        raise DomainError(f"log of non-positive value {t}")
    return math.log(t), 1.0 / t, -1.0 / t**2, 2.0 / t**3


def _fn_sin(t):
    s, c = math.sin(t), math.cos(t)
    return s, c, -s, -c


def _fn_cos(t):
    s, c = math.sin(t), math.cos(t)
    return c, -s, -c, s


def _fn_sinh(t):
    s, c = math.sinh(t), math.cosh(t)
    return s, c, s, c


def _fn_cosh(t):
    s, c = math.sinh(t), math.cosh(t)
    return c, s, c, s


def _fn_tanh(t):
    v = math.tanh(t)
    s = 1.0 - v * v
    return v, s, -2.0 * v * s, s * (6.0 * v * v - 2.0)


def _fn_sqrt(t):
    if t <= 0.0:
        raise DomainError(f"sqrt of non-positive value {t}")
    r = math.sqrt(t)
    return r, 0.5 / r, -0.25 / (t * r), 0.375 / (t * t * r)


def _fn_abs(t):
    if t == 0.0:
        raise DomainError("abs is not differentiable at 0")
    s = 1.0 if t > 0 else -1.0
    return abs(t), s, 0.0, 0.0


_FUNCTION_JETS = {
    "exp": _fn_exp,
    "log": _fn_log,
    "sin": _fn_sin,
    "cos": _fn_cos,
    "sinh": _fn_sinh,
    "cosh": _fn_cosh,
    "tanh": _fn_tanh,
    "sqrt": _fn_sqrt,
    "abs": _fn_abs,
}


def eval_jet(ast: ExprAst, point, coords: tuple[str, ...], order: int) -> Jet:
    """Evaluate an expression AST to a jet of the given order at a point."""
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"unsupported jet order {order}")
    n = len(coords)
    index = {name: i for i, name in enumerate(coords)}

    def rec(node) -> Jet:
        if isinstance(node, Num):
            return Jet.constant(float(node.value), n, order)
        if isinstance(node, Const):
            return Jet.constant(CONSTANTS[node.name], n, order)
        if isinstance(node, Var):
            i = index[node.name]
            return Jet.coordinate(i, float(point[i]), n, order)
        if isinstance(node, Neg):
            return -rec(node.arg)
        if isinstance(node, BinOp):
            if node.op == "^":
                base = rec(node.left)
                if isinstance(node.right, Num):
                    return base.pow_const(node.right.value)
                if isinstance(node.right, Neg) and isinstance(node.right.arg, Num):
                    return base.pow_const(-node.right.arg.value)
                expo = rec(node.right)
                if base.value <= 0.0:
                    raise DomainError("variable exponent needs a positive base")
                w = expo * base.apply(*_fn_log(base.value))
                return w.apply(*_fn_exp(w.value))
            a, b = rec(node.left), rec(node.right)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
        if isinstance(node, Fun):
            u = rec(node.arg)
            return u.apply(*_FUNCTION_JETS[node.name](u.value))
        raise ExprError(f"cannot evaluate node {node!r}")

    return rec(ast)
