"""Weighted quadrature on charts: inner products in L^2_mu, Gram matrices of the
excited states, integrability evidence for the moment conditions, and level-set
volumes on product charts.

Rules per direction: Gauss-Legendre on (truncated) intervals, uniform nodes on
periodic directions (spectrally accurate for smooth periodic integrands). The
density e^{2h} sqrt(det g) is absorbed into the node weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chart import Chart
from .forms import FormField, differential, pointwise_inner
from .states import EVEN, StateTable, excited_state
from .weighted import LadderOperators, WeightSpec


class QuadratureError(ValueError):
    pass


def _axis_rule(lo, hi, period, radius: float, nodes: int):
    if period is not None:
        xs = np.linspace(0.0, period, nodes, endpoint=False)
        ws = np.full(nodes, period / nodes)
        return xs, ws
    a = lo if lo is not None else -radius
    b = hi if hi is not None else radius
    x, w = np.polynomial.legendre.leggauss(nodes)
    xs = 0.5 * (b - a) * x + 0.5 * (a + b)
    ws = 0.5 * (b - a) * w
    return xs, ws


@dataclass
class QuadratureGrid:
    chart: Chart
    nodes: np.ndarray        # (N, n)
    base_weights: np.ndarray  # product rule weights for coordinate Lebesgue measure
    riemann_density: np.ndarray  # sqrt(det g) at nodes
    mu_density: np.ndarray | None  # e^{2h} sqrt(det g), when built for a weight
    radius: float

    @property
    def mu_weights(self) -> np.ndarray:
        if self.mu_density is None:
            raise QuadratureError("grid was built without a weight")
        return self.base_weights * self.mu_density

    def total_mass(self) -> float:
        return float(self.mu_weights.sum())


def build_grid(chart: Chart, weight: WeightSpec | None = None, radius: float = 12.0,
               nodes_unbounded: int = 200, nodes_periodic: int = 24,
               nodes_bounded: int = 64) -> QuadratureGrid:
    axes = []
    for (lo, hi), period in zip(chart.domain, chart.periods):
        if period is not None:
            axes.append(_axis_rule(lo, hi, period, radius, nodes_periodic))
        elif lo is None or hi is None:
            axes.append(_axis_rule(lo, hi, None, radius, nodes_unbounded))
        else:
            axes.append(_axis_rule(lo, hi, None, radius, nodes_bounded))
    mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    nodes = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    wmesh = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    base = np.ones(nodes.shape[0])
    for wm in wmesh:
        base = base * wm.reshape(-1)

    dens = np.empty(nodes.shape[0])
    for i, row in enumerate(nodes):
        dens[i] = chart.metric_values(tuple(row))[2]

    mu = None
    if weight is not None:
        h = weight.h
        mu = np.array([math.exp(2.0 * h(tuple(row))) for row in nodes]) * dens
    return QuadratureGrid(chart, nodes, base, dens, mu, radius)


def inner_product_mu(grid: QuadratureGrid, a: FormField, b: FormField) -> float:
    """<a, b>_mu = integral of the pointwise inner product against d(mu)."""
    if a.chart is not grid.chart or b.chart is not grid.chart:
        raise QuadratureError("forms and grid live on different charts")
    w = grid.mu_weights
    total = 0.0
    for i, row in enumerate(grid.nodes):
        total += w[i] * pointwise_inner(a, b, grid.chart, tuple(row))
    return float(total)


def state_form(ops: LadderOperators, table: StateTable) -> FormField:
    """Realize a state table as a concrete form on the chart of the weight."""
    chart, h = ops.chart, ops.h
    coeffs = [float(c) for c in table.coeffs]

    def poly_rule(pt, od):
        from .jets import Jet

        hj = h.jet(pt, od)
        acc = None
        power = None
        for i, c in enumerate(coeffs):
            if i == 0:
                term = Jet.constant(c, chart.n, od)
            else:
                power = hj if power is None else power * hj
                term = power * c
            acc = term if acc is None else acc + term
        return acc

    if table.sector == EVEN:
        return FormField(chart, {0: {(): poly_rule}})
    dh = differential(h)

    def comp(i: int):
        def rule(pt, od):
            return poly_rule(pt, od) * dh.comps[1][(i,)](pt, od)

        return rule

    return FormField(chart, {1: {(i,): comp(i) for i in range(chart.n)}})


def gram_matrix(grid: QuadratureGrid, ops: LadderOperators, kmax: int,
                alpha=None, gamma=None) -> np.ndarray:
    """Gram matrix of the excited states phi_0 .. phi_kmax in L^2_mu."""
    a = alpha if alpha is not None else ops.weight.alpha
    g = gamma if gamma is not None else ops.weight.gamma
    forms = [state_form(ops, excited_state(k, a, g)) for k in range(kmax + 1)]
    out = np.zeros((kmax + 1, kmax + 1))
    for i in range(kmax + 1):
        for j in range(i, kmax + 1):
            # states of opposite parity pair a 0-form with a 1-form: zero pointwise
            if (i + j) % 2 == 1:
                continue
            val = inner_product_mu(grid, forms[i], forms[j])
            out[i, j] = out[j, i] = val
    return out


@dataclass
class MomentEstimate:
    j: int
    value: float
    tail_bound: float | None
    converged: bool


def moment_estimates(chart: Chart, weight: WeightSpec, jmax: int, radius: float = 12.0,
                     nodes_unbounded: int = 200, nodes_periodic: int = 8,
                     growth: float = 1.25) -> list[MomentEstimate]:
    """Truncated moments of |h|^j against d(mu), with a geometric tail estimate.

    Three increasing truncation radii give two increments; if they do not decay
    the moment is flagged divergent. This is evidence, never proof.
    """
    h = weight.h
    radii = [radius, radius * growth, radius * growth**2]
    vals = np.zeros((3, jmax + 1))
    for r_i, r in enumerate(radii):
        grid = build_grid(chart, weight, radius=r, nodes_unbounded=nodes_unbounded,
                          nodes_periodic=nodes_periodic)
        hv = np.array([h(tuple(row)) for row in grid.nodes])
        w = grid.mu_weights
        for j in range(jmax + 1):
            vals[r_i, j] = float((np.abs(hv) ** j * w).sum())
    out = []
    for j in range(jmax + 1):
        v1, v2, v3 = vals[:, j]
        d1, d2 = abs(v2 - v1), abs(v3 - v2)
        scale = max(abs(v3), 1e-300)
        if d2 <= 1e-13 * scale:
            out.append(MomentEstimate(j, float(v3), float(d2), True))
            continue
        rho = d2 / d1 if d1 > 0 else 1.0
        if rho < 0.7:
            tail = d2 * rho / (1.0 - rho)
            out.append(MomentEstimate(j, float(v3), float(tail), True))
        else:
            out.append(MomentEstimate(j, float(v3), None, False))
    return out


def one_form_norm_identity_residual(grid: QuadratureGrid, ops: LadderOperators, j: int) -> float:
    """Quadrature residual of ||h^j dh||^2_mu = integral (2 gamma h^{2j} - 2 alpha h^{2j+1}) d(mu)."""
    alpha, gamma = ops.weight.alpha, ops.weight.gamma
    h = ops.h
    table = StateTable("odd", tuple((1.0 if i == j else 0.0) for i in range(j + 1)))
    form = state_form(ops, table)
    lhs = inner_product_mu(grid, form, form)
    hv = np.array([h(tuple(row)) for row in grid.nodes])
    w = grid.mu_weights
    rhs = float(((2.0 * gamma * hv ** (2 * j) - 2.0 * alpha * hv ** (2 * j + 1)) * w).sum())
    return lhs - rhs


def level_set_volume(chart: Chart, axis: int, values: Sequence[float],
                     nodes_periodic: int = 32, nodes_bounded: int = 64) -> np.ndarray:
    """(n-1)-volume of the slice {x_axis = s} for product charts.

    Requires the metric to have no cross terms between the axis and the other
    directions at sampled nodes (the slice metric is then the minor of g).
    """
    others = [i for i in range(chart.n) if i != axis]
    if not others:
        raise QuadratureError("a 1-dimensional chart has point slices")
    axes = []
    for i in others:
        lo, hi = chart.domain[i]
        period = chart.periods[i]
        if period is None and (lo is None or hi is None):
            raise QuadratureError("slice directions must be bounded or periodic")
        axes.append(_axis_rule(lo, hi, period, 0.0, nodes_periodic if period is not None else nodes_bounded))
    mesh = np.meshgrid(*[a[0] for a in axes], indexing="ij") if axes else []
    pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    wmesh = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    base = np.ones(pts.shape[0])
    for wm in wmesh:
        base = base * wm.reshape(-1)

    out = np.zeros(len(values))
    for vi, s in enumerate(values):
        total = 0.0
        for row, bw in zip(pts, base):
            point = [0.0] * chart.n
            point[axis] = float(s)
            for t, i in enumerate(others):
                point[i] = float(row[t])
            g = chart.metric_values(tuple(point))[0]
            cross = g[axis, others]
            if np.max(np.abs(cross)) > 1e-10:
                raise QuadratureError(
                    f"metric has cross terms between axis {axis} and slice directions at {tuple(point)}"
                )
            minor = g[np.ix_(others, others)]
            total += bw * math.sqrt(float(np.linalg.det(minor)))
        out[vi] = total
    return out
