"""Finite-difference spectra of the conjugated number operator.

After the ground-state transform the operator is lap/2 + V with the scalar
potential V = -alpha h - alpha/2 + gamma, so on flat model charts the spectrum
should approach {alpha k} plus torus-mode offsets. Discretization: second-order
three-point stencils, Dirichlet truncation on unbounded directions, periodic
wrap on torus directions. The assembled matrix is symmetric by construction,
which keeps the computed spectrum real.

1D supports general metrics through the Sturm-Liouville flux form with the
similarity symmetrization; 2D requires an identity metric (use the period
length, not the metric, to size a torus direction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .chart import Chart, metric_at
from .weighted import LadderOperators, WeightSpec


class SpectrumError(ValueError):
    pass


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    targets: np.ndarray
    errors: np.ndarray
    grid_shape: tuple
    radius: float
    meta: dict = field(default_factory=dict)


def _axis_nodes(chart: Chart, axis: int, n: int, radius: float):
    period = chart.periods[axis]
    if period is not None:
        dx = period / n
        return np.arange(n) * dx, dx, True
    lo, hi = chart.domain[axis]
    a = lo if lo is not None else -radius
    b = hi if hi is not None else radius
    dx = (b - a) / (n + 1)
    return a + dx * np.arange(1, n + 1), dx, False


def _second_difference(n: int, dx: float, periodic: bool) -> scipy.sparse.spmatrix:
    """-(d^2/dx^2) as a symmetric sparse matrix (Dirichlet or wrapped)."""
    main = np.full(n, 2.0)
    off = np.full(n - 1, -1.0)
    K = scipy.sparse.diags([off, main, off], [-1, 0, 1], format="lil")
    if periodic:
        K[0, n - 1] = -1.0
        K[n - 1, 0] = -1.0
    return (K / dx**2).tocsr()


def _is_identity_metric(chart: Chart, points: Sequence[tuple]) -> bool:
    for p in points:
        g = metric_at(chart, p).g
        if np.max(np.abs(g - np.eye(chart.n))) > 1e-12:
            return False
    return True


def model_targets(alpha: float, count: int, periods: Sequence[float | None]) -> np.ndarray:
    """The model spectrum {alpha k} plus torus-mode offsets 2 pi^2 m^2 / L^2."""
    offsets = [0.0]
    for L in periods:
        if L is None:
            continue
        new = []
        for m in range(0, 64):
            off = 2.0 * math.pi**2 * m**2 / L**2
            mult = 1 if m == 0 else 2
            new.extend([off] * mult)
        offsets = [a + b for a in offsets for b in new]
    vals = sorted(alpha * k + off for k in range(count + 8) for off in offsets)
    return np.array(vals[: count + 8])


def fd_spectrum(chart: Chart, weight: WeightSpec, n: int | Sequence[int], radius: float,
                count: int) -> SpectrumResult:
    """Lowest eigenvalues of the discretized lap/2 + V."""
    alpha, gamma = weight.alpha, weight.gamma
    if alpha is None or gamma is None:
        raise SpectrumError("the reduced potential needs alpha and gamma")
    dims = chart.n
    if dims > 2:
        raise SpectrumError("finite-difference spectra support dims <= 2")
    shape = (n,) * dims if isinstance(n, int) else tuple(n)
    if len(shape) != dims:
        raise SpectrumError("grid shape does not match the chart dimension")
    unbounded = sum(1 for i in range(dims) if chart.periods[i] is None)
    if unbounded > 1 and dims == 2:
        raise SpectrumError("at most one unbounded direction in 2D")

    ops = LadderOperators(weight)
    V = ops.schrodinger_potential()

    if dims == 1:
        from .jets import eval_jet

        xs, dx, periodic = _axis_nodes(chart, 0, shape[0], radius)
        gvals = np.array([
            eval_jet(chart.metric_exprs[0][0], (float(x),), chart.coords, 0).value for x in xs
        ])
        vvals = np.array([V((float(x),)) for x in xs])
        if np.max(np.abs(gvals - 1.0)) < 1e-12:
            K = _second_difference(shape[0], dx, periodic)
            H = (0.5 * K + scipy.sparse.diags(vvals)).toarray()
        else:
            # Sturm-Liouville flux form: lap u = -(1/w)(p u')' with p = g^{-1/2}, w = g^{1/2},
            # symmetrized by conjugation with diag(w^{1/2}).
            if periodic:
                raise SpectrumError("curved periodic 1D spectra not supported")
            half = np.concatenate([[xs[0] - dx / 2], (xs[:-1] + xs[1:]) / 2, [xs[-1] + dx / 2]])
            p_half = np.array([metric_at(chart, (float(x),)).g[0, 0] ** -0.5 for x in half])
            w = np.sqrt(gvals)
            m = shape[0]
            K = scipy.sparse.lil_matrix((m, m))
            for i in range(m):
                K[i, i] = (p_half[i] + p_half[i + 1]) / dx**2
                if i > 0:
                    K[i, i - 1] = -p_half[i] / dx**2
                if i < m - 1:
                    K[i, i + 1] = -p_half[i + 1] / dx**2
            s = 1.0 / np.sqrt(w)
            H = 0.5 * (K.toarray() * np.outer(s, s)) + np.diag(vvals)
        asym = np.max(np.abs(H - H.T))
        if asym > 1e-10:
            raise SpectrumError(f"assembled operator is not symmetric (defect {asym})")
        tri_d = np.diag(H)
        tri_e = np.diag(H, 1)
        if np.max(np.abs(H - (np.diag(tri_d) + np.diag(tri_e, 1) + np.diag(tri_e, -1)))) < 1e-14:
            evals = scipy.linalg.eigh_tridiagonal(tri_d, tri_e, select="i",
                                                  select_range=(0, count - 1), eigvals_only=True)
        else:
            evals = np.sort(scipy.linalg.eigvalsh(H))[:count]
        eigenvalues = np.array(evals[:count])
    else:
        probe = [tuple(0.1 * (i + 1) for i in range(dims))]
        if not _is_identity_metric(chart, probe):
            raise SpectrumError("2D spectra require an identity metric")
        axes = [_axis_nodes(chart, i, shape[i], radius) for i in range(dims)]
        Ks = [_second_difference(shape[i], axes[i][1], axes[i][2]) for i in range(dims)]
        I0 = scipy.sparse.identity(shape[0])
        I1 = scipy.sparse.identity(shape[1])
        K = scipy.sparse.kron(Ks[0], I1) + scipy.sparse.kron(I0, Ks[1])
        pts = [(float(a), float(b)) for a in axes[0][0] for b in axes[1][0]]
        vvals = np.array([V(p) for p in pts])
        H = (0.5 * K + scipy.sparse.diags(vvals)).tocsc()
        sym_defect = abs(H - H.T).max()
        if sym_defect > 1e-10:
            raise SpectrumError(f"assembled operator is not symmetric (defect {sym_defect})")
        evals = scipy.sparse.linalg.eigsh(H, k=count, sigma=-1.0, which="LM",
                                          return_eigenvectors=False)
        eigenvalues = np.sort(evals)

    targets_all = model_targets(alpha, count, chart.periods)
    targets = targets_all[:count]
    errors = eigenvalues - targets
    return SpectrumResult(eigenvalues, targets, errors, shape, radius,
                          meta={"alpha": alpha, "gamma": gamma})
