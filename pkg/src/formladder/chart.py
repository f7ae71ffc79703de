"""Coordinate charts with a metric tensor, and pointwise Riemannian data.

Sign conventions, fixed once for the whole package:

* the Laplace-Beltrami operator is nonnegative:  lap u = -(1/sqrt g) d_i(sqrt g g^{ij} d_j u),
  so on the Euclidean line lap u = -u'';
* tr_g(Hess u) = -lap u;
* Ricci is the contraction R_{sn} = R^m_{s m n} that makes the round sphere positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import ExprAst, parse, variables
from .jets import Jet, JetOrderError, eval_jet

METRIC_JET_ORDER = 2
_CACHE_CAP = 20000


class ChartError(ValueError):
    pass


class ScalarField:
    """A scalar function on a chart, evaluable to jets of order <= 3.

    Backed either by an expression AST (exact jets) or by an arbitrary
    computed rule (point, order) -> Jet, so that derived quantities such as
    |grad u|^2 or sqrt(c - h) are first-class fields.
    """

    def __init__(self, chart: "Chart", ast: ExprAst | None = None,
                 rule: Callable[[tuple, int], Jet] | None = None, name: str = ""):
        if (ast is None) == (rule is None):
            raise ChartError("a scalar field needs exactly one of ast or rule")
        self.chart = chart
        self.ast = ast
        self._rule = rule
        self.name = name
        self._cache: dict[tuple, Jet] = {}

    @staticmethod
    def from_expression(chart: "Chart", text: str, name: str = "") -> "ScalarField":
        ast = parse(text, chart.coords)
        unknown = variables(ast) - set(chart.coords)
        if unknown:
            raise ChartError(f"expression references unknown coordinates {sorted(unknown)}")
        return ScalarField(chart, ast=ast, name=name or text)

    def jet(self, point: tuple, order: int) -> Jet:
        key = (point, order)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.ast is not None:
            val = eval_jet(self.ast, point, self.chart.coords, order)
        else:
            val = self._rule(point, order)
        if len(self._cache) > _CACHE_CAP:
            self._cache.clear()
        self._cache[key] = val
        return val

    def __call__(self, point) -> float:
        return self.jet(tuple(float(v) for v in point), 0).value


def _det_jet(m: list[list[Jet]]) -> Jet:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        minor = [[m[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = m[0][j] * _det_jet(minor)
        if j % 2 == 1:
            term = -term
        total = term if total is None else total + term
    return total


def _inverse_jets(m: list[list[Jet]], det: Jet) -> list[list[Jet]]:
    n = len(m)
    if n == 1:
        return [[det.reciprocal()]]
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = _det_jet(minor) if minor else None
            sign = -1.0 if (i + j) % 2 else 1.0
            inv[j][i] = cof * sign / det
    return inv


@dataclass
class MetricJets:
    """Order-2 jets of the metric machinery at one point."""

    point: tuple
    g: list          # n x n of Jet (order 2)
    ginv: list       # n x n of Jet (order 2)
    det: Jet
    sqrt_det: Jet
    gamma: list      # n x n x n of Jet (order 1), gamma[k][i][j] = Gamma^k_{ij}
    cholesky: np.ndarray

    _ricci: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return len(self.g)

    def g_values(self) -> np.ndarray:
        n = self.n
        return np.array([[self.g[i][j].value for j in range(n)] for i in range(n)])

    def ginv_values(self) -> np.ndarray:
        n = self.n
        return np.array([[self.ginv[i][j].value for j in range(n)] for i in range(n)])

    def gamma_values(self) -> np.ndarray:
        n = self.n
        return np.array(
            [[[self.gamma[k][i][j].value for j in range(n)] for i in range(n)] for k in range(n)]
        )

    def ricci(self) -> np.ndarray:
        if self._ricci is None:
            n = self.n
            gam = self.gamma_values()
            dgam = np.array(
                [[[self.gamma[k][i][j].grad for j in range(n)] for i in range(n)] for k in range(n)]
            )  # dgam[k,i,j,m] = d_m Gamma^k_{ij}
            ric = np.zeros((n, n))
            for s in range(n):
                for v in range(n):
                    r = 0.0
                    for mu in range(n):
                        r += dgam[mu][v][s][mu] - dgam[mu][mu][s][v]
                        for lam in range(n):
                            r += gam[mu][mu][lam] * gam[lam][v][s]
                            r -= gam[mu][v][lam] * gam[lam][mu][s]
                    ric[s, v] = r
            self._ricci = ric
        return self._ricci


@dataclass
class MetricPointData:
    """Plain-number snapshot of the metric at one point."""

    point: tuple
    g: np.ndarray
    ginv: np.ndarray
    sqrt_det: float
    gamma: np.ndarray   # gamma[k, i, j]
    ricci: np.ndarray


@dataclass
class FramePointData:
    """Orthonormal frame {X_j} and coframe {phi^j} at a point.

    frame[:, j] holds the coordinate components of X_j; coframe[j, :] the
    components of phi^j, so that phi^i(X_j) = delta_ij.
    """

    point: tuple
    frame: np.ndarray
    coframe: np.ndarray
    metric: MetricPointData


class Chart:
    """A coordinate box with optional periodic directions and a metric field."""

    def __init__(self, coords: Sequence[str], metric: Sequence[Sequence[ExprAst | str]] | None = None,
                 domain: Sequence[tuple[float | None, float | None]] | None = None,
                 periods: Sequence[float | None] | None = None):
        self.coords = tuple(coords)
        n = len(self.coords)
        if len(set(self.coords)) != n or n == 0:
            raise ChartError("coordinate names must be nonempty and distinct")
        self.n = n
        self.domain = tuple(domain) if domain is not None else tuple((None, None) for _ in range(n))
        self.periods = tuple(periods) if periods is not None else tuple(None for _ in range(n))
        if len(self.domain) != n or len(self.periods) != n:
            raise ChartError("domain/periodic data must match the dimension")
        if metric is None:
            metric = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                entry = metric[i][j]
                row.append(parse(entry, self.coords) if isinstance(entry, str) else entry)
            rows.append(row)
        self.metric_exprs = rows
        self._jet_cache: dict[tuple, MetricJets] = {}
        self._value_cache: dict[tuple, tuple] = {}

    @staticmethod
    def euclidean(coords: Sequence[str]) -> "Chart":
        return Chart(coords)

    def contains(self, point) -> bool:
        for v, (lo, hi) in zip(point, self.domain):
            if lo is not None and v < lo:
                return False
            if hi is not None and v > hi:
                return False
        return True

    def scalar(self, text_or_ast, name: str = "") -> ScalarField:
        if isinstance(text_or_ast, str):
            return ScalarField.from_expression(self, text_or_ast, name)
        return ScalarField(self, ast=text_or_ast, name=name)

    # --- metric evaluation --------------------------------------------------

    def metric_values(self, point: tuple) -> tuple[np.ndarray, np.ndarray, float]:
        """(g, g^{-1}, sqrt det g) values only, skipping the jet machinery."""
        point = tuple(float(v) for v in point)
        hit = self._value_cache.get(point)
        if hit is not None:
            return hit
        n = self.n
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                v = eval_jet(self.metric_exprs[i][j], point, self.coords, 0).value
                g[i, j] = g[j, i] = v
        det = float(np.linalg.det(g))
        if det <= 0.0:
            raise ChartError(f"metric is not positive definite at {point} (det={det})")
        out = (g, np.linalg.inv(g), math.sqrt(det))
        if len(self._value_cache) > 60000:
            self._value_cache.clear()
        self._value_cache[point] = out
        return out

    def metric_jets(self, point: tuple) -> MetricJets:
        point = tuple(float(v) for v in point)
        hit = self._jet_cache.get(point)
        if hit is not None:
            return hit
        n = self.n
        g = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                jet = eval_jet(self.metric_exprs[i][j], point, self.coords, METRIC_JET_ORDER)
                g[i][j] = jet
                if i != j:
                    g[j][i] = jet
        det = _det_jet(g)
        if det.value <= 0.0:
            raise ChartError(f"metric is not positive definite at {point} (det={det.value})")
        gvals = np.array([[g[i][j].value for j in range(n)] for i in range(n)])
        try:
            chol = np.linalg.cholesky(gvals)
        except np.linalg.LinAlgError as exc:
            raise ChartError(f"metric is not positive definite at {point}") from exc
        ginv = _inverse_jets(g, det)
        rdet = math.sqrt(det.value)
        sqrt_det = det.apply(rdet, 0.5 / rdet, -0.25 / (det.value * rdet), 0.375 / (det.value**2 * rdet))
        ginv1 = [[ginv[i][j].truncated(1) for j in range(n)] for i in range(n)]
        gamma = [[[None] * n for _ in range(n)] for _ in range(n)]
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    total = None
                    for l in range(n):
                        # g derivatives come out at order 1, matching ginv1
                        term = ginv1[k][l] * (
                            g[j][l].derivative(i) + g[i][l].derivative(j) - g[i][j].derivative(l)
                        )
                        total = term if total is None else total + term
                    val = total * 0.5
                    gamma[k][i][j] = val
                    if i != j:
                        gamma[k][j][i] = val
        mj = MetricJets(point, g, ginv, det, sqrt_det, gamma, chol)
        if len(self._jet_cache) > 4000:
            self._jet_cache.clear()
        self._jet_cache[point] = mj
        return mj

    def validate(self, sample_points: Sequence[tuple]) -> None:
        """Sampled invariants: symmetry, positive-definiteness, periodicity."""
        for p in sample_points:
            p = tuple(float(v) for v in p)
            for i in range(self.n):
                for j in range(i + 1, self.n):
                    a = eval_jet(self.metric_exprs[i][j], p, self.coords, 0).value
                    b = eval_jet(self.metric_exprs[j][i], p, self.coords, 0).value
                    if abs(a - b) > 1e-12 * (1 + abs(a)):
                        raise ChartError(f"metric not symmetric at {p}: g[{i}][{j}] != g[{j}][{i}]")
            self.metric_jets(p)  # raises on non-SPD
            for k, period in enumerate(self.periods):
                if period is None:
                    continue
                shifted = tuple(v + period if a == k else v for a, v in enumerate(p))
                for i in range(self.n):
                    for j in range(self.n):
                        a = eval_jet(self.metric_exprs[i][j], p, self.coords, 0).value
                        b = eval_jet(self.metric_exprs[i][j], shifted, self.coords, 0).value
                        if abs(a - b) > 1e-9 * (1 + abs(a)):
                            raise ChartError(
                                f"metric entry g[{i}][{j}] is not invariant under period of {self.coords[k]}"
                            )


# --- pointwise differential operators ---------------------------------------


def metric_at(chart: Chart, point) -> MetricPointData:
    point = tuple(float(v) for v in point)
    mj = chart.metric_jets(point)
    return MetricPointData(
        point=point,
        g=mj.g_values(),
        ginv=mj.ginv_values(),
        sqrt_det=mj.sqrt_det.value,
        gamma=mj.gamma_values(),
        ricci=mj.ricci(),
    )


def frame_at(chart: Chart, point) -> FramePointData:
    data = metric_at(chart, point)
    mj = chart.metric_jets(data.point)
    L = mj.cholesky
    frame = np.linalg.inv(L).T     # columns X_j, so frame^T g frame = I
    coframe = L.T                  # rows phi^j
    return FramePointData(data.point, frame, coframe, data)


def gradient(chart: Chart, u: ScalarField, point) -> np.ndarray:
    point = tuple(float(v) for v in point)
    du = u.jet(point, 1).grad
    return metric_at(chart, point).ginv @ du


def _div_correction_jets(chart: Chart, point: tuple, order: int) -> list[Jet]:
    """Jets of b^j = (1/sqrt g) d_i(sqrt g g^{ij}), order <= 1."""
    mj = chart.metric_jets(point)
    n = chart.n
    out = []
    for j in range(n):
        total = None
        for i in range(n):
            w = mj.sqrt_det * mj.ginv[i][j]       # order 2
            term = w.derivative(i)                # order 1
            total = term if total is None else total + term
        out.append((total / mj.sqrt_det.truncated(order)).truncated(order))
    return out


def laplacian_jet(chart: Chart, u: ScalarField, point: tuple, order: int = 0) -> Jet:
    """Jet of the (nonnegative) Laplace-Beltrami of u; order <= 1."""
    if order > 1:
        raise JetOrderError("laplacian jets available to order 1 only")
    point = tuple(float(v) for v in point)
    mj = chart.metric_jets(point)
    uj = u.jet(point, order + 2)
    n = chart.n
    b = _div_correction_jets(chart, point, order)
    total = None
    for i in range(n):
        dui = uj.derivative(i)                    # order+1
        for j in range(n):
            term = mj.ginv[i][j].truncated(order) * dui.derivative(j)
            total = term if total is None else total + term
    for j in range(n):
        total = total + b[j] * uj.derivative(j).truncated(order)
    return -total


def laplace_beltrami(chart: Chart, u: ScalarField, point) -> float:
    return laplacian_jet(chart, u, tuple(float(v) for v in point), 0).value


def hessian(chart: Chart, u: ScalarField, point) -> np.ndarray:
    """(Hess u)_{ij} = d_i d_j u - Gamma^k_{ij} d_k u."""
    point = tuple(float(v) for v in point)
    uj = u.jet(point, 2)
    data = metric_at(chart, point)
    return uj.hess - np.einsum("kij,k->ij", data.gamma, uj.grad)


def hessian_norm2(chart: Chart, u: ScalarField, point) -> float:
    """Hilbert-Schmidt norm squared of Hess u with indices raised by g."""
    point = tuple(float(v) for v in point)
    H = hessian(chart, u, point)
    gi = metric_at(chart, point).ginv
    return float(np.einsum("ik,jl,ij,kl->", gi, gi, H, H))


def grad_norm2_field(chart: Chart, u: ScalarField) -> ScalarField:
    """|grad u|^2 = g^{ij} d_i u d_j u as a derived field (jets to order 2)."""

    def rule(point: tuple, order: int) -> Jet:
        if order > 2:
            raise JetOrderError("|grad u|^2 jets available to order 2 only")
        mj = chart.metric_jets(point)
        uj = u.jet(point, order + 1)
        n = chart.n
        total = None
        for i in range(n):
            dui = uj.derivative(i)
            for j in range(i, n):
                term = mj.ginv[i][j].truncated(order) * dui * uj.derivative(j)
                if i != j:
                    term = term * 2.0
                total = term if total is None else total + term
        return total.truncated(order)

    return ScalarField(chart, rule=rule, name=f"|grad {u.name}|^2")


def bochner_residual(chart: Chart, u: ScalarField, point) -> float:
    """Residual of the Bochner identity

        -lap(|grad u|^2 / 2) = |Hess u|^2 - <grad u, grad(lap u)> + Ric(grad u, grad u).
    """
    point = tuple(float(v) for v in point)
    energy = grad_norm2_field(chart, u)
    lhs = -0.5 * laplace_beltrami(chart, energy, point)
    data = metric_at(chart, point)
    du = u.jet(point, 1).grad
    dlap = laplacian_jet(chart, u, point, 1).grad
    cross = float(du @ data.ginv @ dlap)
    gradu = data.ginv @ du
    ric_term = float(gradu @ data.ricci @ gradu)
    rhs = hessian_norm2(chart, u, point) - cross + ric_term
    return lhs - rhs
