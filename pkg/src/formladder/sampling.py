"""Deterministic generators: quasi-random sample points, random charts, fields,
forms, and smooth bump fields for integration-by-parts checks.

Random metrics are identity plus a small symmetric polynomial (or trigonometric,
on periodic directions) perturbation, with coefficients capped so Gershgorin
dominance keeps the metric positive definite on the sampling box.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .chart import Chart, ScalarField
from .expr import BinOp, ExprAst, Fun, Num, Var
from .forms import FormField
from .jets import Jet

from fractions import Fraction


def halton_points(chart: Chart, count: int, radius: float = 3.0) -> list[tuple]:
    """Quasi-random points in the domain box, unbounded directions truncated."""
    lows, highs = [], []
    for (lo, hi), period in zip(chart.domain, chart.periods):
        if period is not None:
            lows.append(0.0)
            highs.append(period)
        else:
            lows.append(lo if lo is not None else -radius)
            highs.append(hi if hi is not None else radius)
    sampler = qmc.Halton(d=chart.n, scramble=False)
    raw = sampler.random(count)
    pts = qmc.scale(raw, lows, highs)
    return [tuple(float(v) for v in row) for row in pts]


def _num(v) -> ExprAst:
    if isinstance(v, int):
        return Num(Fraction(v))
    return Num(float(v))


def _poly_ast(rng: np.random.Generator, coords: Sequence[str], degree: int,
              terms: int, cap: float) -> ExprAst:
    """Random multivariate polynomial with coefficients in [-cap, cap]."""
    n = len(coords)
    total: ExprAst = _num(round(float(rng.uniform(-cap, cap)), 6))
    for _ in range(terms):
        c = round(float(rng.uniform(-cap, cap)), 6)
        mono: ExprAst = _num(c)
        budget = int(rng.integers(1, degree + 1))
        for _ in range(budget):
            i = int(rng.integers(0, n))
            mono = BinOp("*", mono, Var(coords[i]))
        total = BinOp("+", total, mono)
    return total


def _trig_ast(rng: np.random.Generator, coord: str, period: float, cap: float) -> ExprAst:
    c = round(float(rng.uniform(-cap, cap)), 6)
    k = int(rng.integers(1, 3))
    freq = 2.0 * math.pi * k / period
    fn = "sin" if rng.integers(0, 2) == 0 else "cos"
    return BinOp("*", _num(c), Fun(fn, BinOp("*", _num(freq), Var(coord))))


def random_chart(rng: np.random.Generator, dim: int, curved: bool = True,
                 periodic: bool = False) -> Chart:
    """A chart on [-1,1]^dim (or a torus) with a small random SPD metric."""
    coords = [f"x{i}" for i in range(dim)]
    periods = [2.0 * math.pi if periodic else None for _ in range(dim)]
    domain = [(None, None) if periodic else (-1.0, 1.0) for _ in range(dim)]
    cap = 0.15 / max(dim, 1)
    entries = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        for j in range(i, dim):
            if not curved:
                entries[i][j] = _num(1) if i == j else _num(0)
            else:
                if periodic:
                    pert = _trig_ast(rng, coords[int(rng.integers(0, dim))], 2.0 * math.pi, cap)
                else:
                    pert = _poly_ast(rng, coords, 2, 2, cap)
                entries[i][j] = BinOp("+", _num(1), pert) if i == j else pert
            entries[j][i] = entries[i][j]
    return Chart(coords, metric=entries, domain=domain, periods=periods)


def random_scalar(rng: np.random.Generator, chart: Chart, degree: int = 3,
                  terms: int = 4, cap: float = 1.0) -> ScalarField:
    return ScalarField(chart, ast=_poly_ast(rng, chart.coords, degree, terms, cap), name="random scalar")


def random_form(rng: np.random.Generator, chart: Chart, degrees: Sequence[int] | None = None,
                coeff_degree: int = 3, cap: float = 1.0) -> FormField:
    """Random form with polynomial coefficients on the given degrees."""
    n = chart.n
    if degrees is None:
        degrees = range(n + 1)
    comps = {}
    for p in degrees:
        if p < 0 or p > n:
            continue
        row = {}
        for idx in itertools.combinations(range(n), p):
            ast = _poly_ast(rng, chart.coords, coeff_degree, 3, cap)
            fld = ScalarField(chart, ast=ast)
            row[idx] = (lambda f: lambda pt, od: f.jet(pt, od))(fld)
        comps[p] = row
    return FormField(chart, comps)


def random_point(rng: np.random.Generator, chart: Chart, radius: float = 0.8) -> tuple:
    out = []
    for (lo, hi), period in zip(chart.domain, chart.periods):
        if period is not None:
            out.append(float(rng.uniform(0.0, period)))
        else:
            a = lo if lo is not None else -radius
            b = hi if hi is not None else radius
            out.append(float(rng.uniform(a, b)))
    return tuple(out)


def bump_scalar(chart: Chart, center: Sequence[float], radius: float) -> ScalarField:
    """A compactly supported smooth bump exp(-1/(1-|x-c|^2/r^2)) inside the ball."""
    center = tuple(float(v) for v in center)
    r2 = float(radius) ** 2

    def rule(point: tuple, order: int) -> Jet:
        n = chart.n
        u = None
        for i in range(n):
            xi = Jet.coordinate(i, point[i], n, order)
            d = xi - center[i]
            term = d * d * (1.0 / r2)
            u = term if u is None else u + term
        if u.value >= 1.0 - 1e-12:
            return Jet.constant(0.0, n, order)
        w = (Jet.constant(1.0, n, order) - u).reciprocal() * (-1.0)
        e = math.exp(w.value)
        return w.apply(e, e, e, e)

    return ScalarField(chart, rule=rule, name="bump")


def bump_form(rng: np.random.Generator, chart: Chart, center, radius: float,
              degrees: Sequence[int] | None = None) -> FormField:
    """Bump-windowed random polynomial form (compact support)."""
    window = bump_scalar(chart, center, radius)
    return random_form(rng, chart, degrees=degrees, coeff_degree=2).scaled_by_field(window)
