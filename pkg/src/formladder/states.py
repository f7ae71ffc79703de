"""Exact ladder algebra on the graded basis {h^i} (even) and {h^i dh} (odd).

Scalars live in Q[sqrt 2], where every coefficient generated by the creation
and annihilation recursions stays when the weight constants are rational. The
reduction rules

    |dh|^2 -> 2 (gamma - alpha h)        lap h -> alpha

close the algebra, so eigen-identities of the number operator can be checked
with zero tolerance. Floats are accepted for irrational constants; results are
then approximate and callers should label them as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

Rational = Union[Fraction, int]


class StateError(ValueError):
    pass


@dataclass(frozen=True)
class QSqrt2:
    """p + q*sqrt(2) with exact rational p, q."""

    p: Fraction
    q: Fraction

    @staticmethod
    def of(value) -> "QSqrt2":
        if isinstance(value, QSqrt2):
            return value
        return QSqrt2(Fraction(value), Fraction(0))

    def __add__(self, other):
        o = QSqrt2.of(other)
        return QSqrt2(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.p, -self.q)

    def __sub__(self, other):
        return self + (-QSqrt2.of(other))

    def __rsub__(self, other):
        return QSqrt2.of(other) + (-self)

    def __mul__(self, other):
        o = QSqrt2.of(other)
        return QSqrt2(self.p * o.p + 2 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QSqrt2.of(other)
        norm = o.p * o.p - 2 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q[sqrt2]")
        conj = QSqrt2(o.p, -o.q)
        num = self * conj
        return QSqrt2(num.p / norm, num.q / norm)

    def __eq__(self, other):
        o = QSqrt2.of(other) if not isinstance(other, QSqrt2) else other
        return self.p == o.p and self.q == o.q

    def is_zero(self) -> bool:
        return self.p == 0 and self.q == 0

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(2)

    def __repr__(self) -> str:
        return f"QSqrt2({self.p}, {self.q})"


SQRT2 = QSqrt2(Fraction(0), Fraction(1))

EVEN, ODD = "even", "odd"


def _zero_like(alpha):
    return QSqrt2.of(0) if isinstance(alpha, QSqrt2) else 0.0


def _sqrt2_like(alpha):
    return SQRT2 if isinstance(alpha, QSqrt2) else math.sqrt(2.0)


def _is_zero(x) -> bool:
    if isinstance(x, QSqrt2):
        return x.is_zero()
    return x == 0.0


@dataclass(frozen=True)
class StateTable:
    """Coefficients over one sector: even means sum a_i h^i, odd sum b_i h^i dh."""

    sector: str
    coeffs: tuple

    def __post_init__(self):
        if self.sector not in (EVEN, ODD):
            raise StateError(f"unknown sector {self.sector!r}")

    @staticmethod
    def vacuum(exact: bool = True) -> "StateTable":
        one = QSqrt2.of(1) if exact else 1.0
        return StateTable(EVEN, (one,))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def trimmed(self) -> "StateTable":
        cs = list(self.coeffs)
        while len(cs) > 1 and _is_zero(cs[-1]):
            cs.pop()
        return StateTable(self.sector, tuple(cs))

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def leading(self):
        return self.trimmed().coeffs[-1]

    def scaled(self, c) -> "StateTable":
        return StateTable(self.sector, tuple(x * c for x in self.coeffs))

    def __sub__(self, other: "StateTable") -> "StateTable":
        if self.sector != other.sector:
            raise StateError("cannot subtract tables from different sectors")
        m = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [_zero_like(self.coeffs[0])] * (m - len(self.coeffs))
        b = list(other.coeffs) + [_zero_like(other.coeffs[0])] * (m - len(other.coeffs))
        return StateTable(self.sector, tuple(x - y for x, y in zip(a, b)))

    def same_as(self, other: "StateTable") -> bool:
        return (self - other).trimmed().is_zero()


_EXACT_TYPES = (int, Fraction, QSqrt2)


def _normalize_constants(alpha, gamma):
    if isinstance(alpha, _EXACT_TYPES) and isinstance(gamma, _EXACT_TYPES):
        return QSqrt2.of(alpha), QSqrt2.of(gamma)
    return float(alpha), float(gamma)


def create_table(t: StateTable, alpha, gamma) -> StateTable:
    """One creation step; parity flips, degree grows by at most one."""
    alpha, gamma = _normalize_constants(alpha, gamma)
    s2 = _sqrt2_like(alpha)
    zero = _zero_like(alpha)
    cs = t.coeffs
    if t.sector == EVEN:
        # h^j  ->  2^{-1/2} j h^{j-1} dh + 2^{1/2} h^j dh
        out = [zero] * (len(cs) + 1)
        for j, a in enumerate(cs):
            if _is_zero(a):
                continue
            if j >= 1:
                out[j - 1] = out[j - 1] + a * (s2 / 2) * j
            out[j] = out[j] + a * s2
        return StateTable(ODD, tuple(out)).trimmed()
    # h^j dh -> -2^{1/2} j gamma h^{j-1} + (2^{1/2} j alpha - 2^{3/2} gamma + 2^{-1/2} alpha) h^j
    #           + 2^{3/2} alpha h^{j+1}
    out = [zero] * (len(cs) + 2)
    for j, b in enumerate(cs):
        if _is_zero(b):
            continue
        if j >= 1:
            out[j - 1] = out[j - 1] + b * (-(s2 * gamma) * j)
        out[j] = out[j] + b * (s2 * alpha * j - 2 * s2 * gamma + (s2 / 2) * alpha)
        out[j + 1] = out[j + 1] + b * (2 * s2 * alpha)
    return StateTable(EVEN, tuple(out)).trimmed()


def annihilate_table(t: StateTable, alpha, gamma) -> StateTable:
    """One annihilation step under the same reductions."""
    alpha, gamma = _normalize_constants(alpha, gamma)
    s2 = _sqrt2_like(alpha)
    zero = _zero_like(alpha)
    cs = t.coeffs
    if t.sector == EVEN:
        # h^j -> 2^{-1/2} j h^{j-1} dh
        out = [zero] * max(len(cs) - 1, 1)
        for j, a in enumerate(cs):
            if j >= 1 and not _is_zero(a):
                out[j - 1] = out[j - 1] + a * (s2 / 2) * j
        return StateTable(ODD, tuple(out)).trimmed()
    # h^j dh -> -2^{1/2} j gamma h^{j-1} + (2^{1/2} j alpha + 2^{-1/2} alpha) h^j
    out = [zero] * (len(cs) + 1)
    for j, b in enumerate(cs):
        if _is_zero(b):
            continue
        if j >= 1:
            out[j - 1] = out[j - 1] + b * (-(s2 * gamma) * j)
        out[j] = out[j] + b * (s2 * alpha * j + (s2 / 2) * alpha)
    return StateTable(EVEN, tuple(out)).trimmed()


def number_table(t: StateTable, alpha, gamma) -> StateTable:
    return create_table(annihilate_table(t, alpha, gamma), alpha, gamma)


def commutator_table(t: StateTable, alpha, gamma) -> StateTable:
    lower_raise = create_table(annihilate_table(t, alpha, gamma), alpha, gamma)
    raise_lower = annihilate_table(create_table(t, alpha, gamma), alpha, gamma)
    return raise_lower - lower_raise


def excited_state(k: int, alpha, gamma) -> StateTable:
    """phi_k as a table: k creation steps applied to the vacuum."""
    if k < 0:
        raise StateError("state index must be nonnegative")
    alpha, gamma = _normalize_constants(alpha, gamma)
    t = StateTable.vacuum(exact=isinstance(alpha, QSqrt2))
    for _ in range(k):
        t = create_table(t, alpha, gamma)
    return t


def leading_coefficient(j: int, alpha, gamma):
    """Leading coefficient of the even state phi_{2j}; nonzero for alpha > 0."""
    t = excited_state(2 * j, alpha, gamma)
    lead = t.leading()
    if _is_zero(lead):
        raise StateError(f"phi_{2*j} unexpectedly vanished")
    return lead


def tables_to_csv(tables: Iterable[StateTable]) -> str:
    """CSV rows (k, i, p, q); float-mode coefficients put their value in p."""
    lines = ["k,i,p,q"]
    for k, t in enumerate(tables):
        for i, c in enumerate(t.coeffs):
            if isinstance(c, QSqrt2):
                lines.append(f"{k},{i},{c.p},{c.q}")
            else:
                lines.append(f"{k},{i},{c!r},0")
    return "\n".join(lines) + "\n"
