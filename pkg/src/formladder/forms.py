"""Graded differential forms over a chart, with the exterior-calculus toolbox.

A FormField stores, per degree p, coefficient functions on strictly increasing
multi-indices. Coefficients are lazy rules (point, order) -> Jet, so operators
compose symbolically-by-closure: d and delta raise the jet order they demand
from their input by one. The composition budget is the jet cap (order 3).

Two independent routes to the codifferential are kept deliberately: the
covariant-divergence formula (primary, orientation-free) and the Hodge-star
route delta = (-1)^{n(p+1)+1} star d star (cross-check).
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

from .chart import Chart, ScalarField
from .jets import Jet, JetOrderError

Coefficient = Callable[[tuple, int], Jet]


class FormError(ValueError):
    pass


def _memoized(fn: Coefficient) -> Coefficient:
    cache: dict[tuple, Jet] = {}

    def wrapper(point: tuple, order: int) -> Jet:
        key = (point, order)
        hit = cache.get(key)
        if hit is None:
            hit = fn(point, order)
            if len(cache) > 4096:
                cache.clear()
            cache[key] = hit
        return hit

    return wrapper


def sort_index(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort a multi-index, returning (sign, sorted) with sign 0 on repeats."""
    idx = tuple(idx)
    seen = set()
    for i in idx:
        if i in seen:
            return 0, idx
        seen.add(i)
    perm = sorted(range(len(idx)), key=lambda t: idx[t])
    sign = 1
    # count inversions of the sorting permutation
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign, tuple(sorted(idx))


def perm_sign(seq: Sequence[int]) -> int:
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


class FormValue:
    """The value of a (possibly mixed-degree) form at a point."""

    def __init__(self, n: int, comps: dict[int, dict[tuple, float]] | None = None):
        self.n = n
        self.comps = comps or {}

    def get(self, p: int, idx: tuple) -> float:
        return self.comps.get(p, {}).get(idx, 0.0)

    def __sub__(self, other: "FormValue") -> "FormValue":
        out: dict[int, dict[tuple, float]] = {}
        for p in set(self.comps) | set(other.comps):
            row = {}
            keys = set(self.comps.get(p, {})) | set(other.comps.get(p, {}))
            for idx in keys:
                row[idx] = self.get(p, idx) - other.get(p, idx)
            out[p] = row
        return FormValue(self.n, out)

    def __add__(self, other: "FormValue") -> "FormValue":
        out: dict[int, dict[tuple, float]] = {}
        for p in set(self.comps) | set(other.comps):
            row = {}
            keys = set(self.comps.get(p, {})) | set(other.comps.get(p, {}))
            for idx in keys:
                row[idx] = self.get(p, idx) + other.get(p, idx)
            out[p] = row
        return FormValue(self.n, out)

    def scaled(self, c: float) -> "FormValue":
        return FormValue(self.n, {p: {i: c * v for i, v in row.items()} for p, row in self.comps.items()})

    def max_abs(self) -> float:
        m = 0.0
        for row in self.comps.values():
            for v in row.values():
                m = max(m, abs(v))
        return m


class FormField:
    """Chart-attached graded form with lazy coefficient rules."""

    def __init__(self, chart: Chart, comps: dict[int, dict[tuple, Coefficient]] | None = None):
        self.chart = chart
        self.comps: dict[int, dict[tuple, Coefficient]] = comps or {}

    # --- constructors -------------------------------------------------------

    @staticmethod
    def zero(chart: Chart) -> "FormField":
        return FormField(chart)

    @staticmethod
    def from_scalar(field: ScalarField) -> "FormField":
        return FormField(field.chart, {0: {(): lambda pt, od: field.jet(pt, od)}})

    @staticmethod
    def constant(chart: Chart, value: float) -> "FormField":
        return FormField(chart, {0: {(): lambda pt, od: Jet.constant(value, chart.n, od)}})

    @staticmethod
    def from_components(chart: Chart, degree: int, comps: dict[tuple, ScalarField]) -> "FormField":
        rows = {}
        for idx, f in comps.items():
            sign, s = sort_index(idx)
            if sign == 0:
                continue
            rows[s] = (lambda ff, sg: lambda pt, od: ff.jet(pt, od) * float(sg))(f, sign)
        return FormField(chart, {degree: rows})

    def with_component(self, degree: int, idx: tuple, rule: Coefficient) -> "FormField":
        comps = {p: dict(r) for p, r in self.comps.items()}
        comps.setdefault(degree, {})[tuple(idx)] = _memoized(rule)
        return FormField(self.chart, comps)

    # --- evaluation ---------------------------------------------------------

    def degrees(self) -> list[int]:
        return sorted(p for p, row in self.comps.items() if row)

    def coeff_jet(self, p: int, idx: tuple, point: tuple, order: int) -> Jet | None:
        """Jet of the coefficient on an arbitrary (possibly unsorted) index."""
        sign, s = sort_index(idx)
        if sign == 0:
            return None
        rule = self.comps.get(p, {}).get(s)
        if rule is None:
            return None
        jet = rule(point, order)
        return jet if sign == 1 else -jet

    def at(self, point) -> FormValue:
        point = tuple(float(v) for v in point)
        out: dict[int, dict[tuple, float]] = {}
        for p, row in self.comps.items():
            vals = {}
            for idx, rule in row.items():
                vals[idx] = rule(point, 0).value
            if vals:
                out[p] = vals
        return FormValue(self.chart.n, out)

    # --- linear structure -----------------------------------------------------

    def __add__(self, other: "FormField") -> "FormField":
        if other.chart is not self.chart:
            raise FormError("forms live on different charts")
        comps: dict[int, dict[tuple, Coefficient]] = {}
        for p in set(self.comps) | set(other.comps):
            row: dict[tuple, Coefficient] = {}
            for idx in set(self.comps.get(p, {})) | set(other.comps.get(p, {})):
                a = self.comps.get(p, {}).get(idx)
                b = other.comps.get(p, {}).get(idx)
                if a is not None and b is not None:
                    row[idx] = (lambda fa, fb: _memoized(lambda pt, od: fa(pt, od) + fb(pt, od)))(a, b)
                else:
                    row[idx] = a if a is not None else b
            comps[p] = row
        return FormField(self.chart, comps)

    def __sub__(self, other: "FormField") -> "FormField":
        return self + other.scaled(-1.0)

    def scaled(self, c: float) -> "FormField":
        comps = {
            p: {idx: (lambda f, cc: lambda pt, od: f(pt, od) * cc)(rule, c) for idx, rule in row.items()}
            for p, row in self.comps.items()
        }
        return FormField(self.chart, comps)

    def scaled_by_field(self, f: ScalarField) -> "FormField":
        comps = {
            p: {
                idx: (lambda r: _memoized(lambda pt, od: r(pt, od) * f.jet(pt, od)))(rule)
                for idx, rule in row.items()
            }
            for p, row in self.comps.items()
        }
        return FormField(self.chart, comps)


class VectorField:
    """A tangent vector field given by coefficient rules per coordinate."""

    def __init__(self, chart: Chart, comps: Sequence[Coefficient]):
        self.chart = chart
        self.comps = list(comps)

    @staticmethod
    def from_scalars(chart: Chart, fields: Sequence[ScalarField]) -> "VectorField":
        return VectorField(chart, [(lambda f: lambda pt, od: f.jet(pt, od))(f) for f in fields])

    def jet(self, i: int, point: tuple, order: int) -> Jet:
        return self.comps[i](point, order)

    def values(self, point: tuple) -> np.ndarray:
        return np.array([c(point, 0).value for c in self.comps])


def gradient_field(chart: Chart, f: ScalarField) -> VectorField:
    """grad f with components g^{ij} d_j f, available to jet order 2."""

    def comp(i: int) -> Coefficient:
        def rule(point: tuple, order: int) -> Jet:
            mj = chart.metric_jets(point)
            fj = f.jet(point, min(order + 1, 3))
            total = None
            for j in range(chart.n):
                term = mj.ginv[i][j].truncated(order) * fj.derivative(j).truncated(order)
                total = term if total is None else total + term
            return total

        return _memoized(rule)

    return VectorField(chart, [comp(i) for i in range(chart.n)])


def differential(f: ScalarField) -> FormField:
    """df as a 1-form field."""
    chart = f.chart

    def comp(i: int) -> Coefficient:
        def rule(point: tuple, order: int) -> Jet:
            return f.jet(point, order + 1).derivative(i)

        return _memoized(rule)

    return FormField(chart, {1: {(i,): comp(i) for i in range(chart.n)}})


# --- multiplicative operations ------------------------------------------------


def wedge(a: FormField, b: FormField) -> FormField:
    if a.chart is not b.chart:
        raise FormError("wedge of forms on different charts")
    chart = a.chart
    out: dict[int, dict[tuple, list]] = {}
    for p, arow in a.comps.items():
        for q, brow in b.comps.items():
            for J, fa in arow.items():
                for K, fb in brow.items():
                    if set(J) & set(K):
                        continue
                    merged = J + K
                    sign, I = sort_index(merged)
                    out.setdefault(p + q, {}).setdefault(I, []).append((sign, fa, fb))
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for deg, rows in out.items():
        comps[deg] = {}
        for I, terms in rows.items():
            def rule(pt, od, terms=terms):
                total = None
                for sign, fa, fb in terms:
                    term = fa(pt, od) * fb(pt, od) * float(sign)
                    total = term if total is None else total + term
                return total

            comps[deg][I] = _memoized(rule)
    return FormField(chart, comps)


def interior(X: VectorField, omega: FormField) -> FormField:
    """Interior product i_X omega (degree-lowering antiderivation)."""
    if X.chart is not omega.chart:
        raise FormError("vector field and form live on different charts")
    chart = omega.chart
    out: dict[int, dict[tuple, list]] = {}
    for p, row in omega.comps.items():
        if p == 0:
            continue
        for J, f in row.items():
            for t, jt in enumerate(J):
                tgt = J[:t] + J[t + 1:]
                sign = (-1.0) ** t
                out.setdefault(p - 1, {}).setdefault(tgt, []).append((sign, jt, f))
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for deg, rows in out.items():
        comps[deg] = {}
        for I, terms in rows.items():
            def rule(pt, od, terms=terms):
                total = None
                for sign, jt, f in terms:
                    term = X.jet(jt, pt, od) * f(pt, od) * sign
                    total = term if total is None else total + term
                return total

            comps[deg][I] = _memoized(rule)
    return FormField(chart, comps)


def pointwise_inner(a: FormField | FormValue, b: FormField | FormValue, chart: Chart, point) -> float:
    """<a, b>_x induced by g on each exterior power (degrees are orthogonal)."""
    point = tuple(float(v) for v in point)
    av = a.at(point) if isinstance(a, FormField) else a
    bv = b.at(point) if isinstance(b, FormField) else b
    gi = chart.metric_values(point)[1]
    total = 0.0
    for p in set(av.comps) & set(bv.comps):
        for I, va in av.comps[p].items():
            if va == 0.0:
                continue
            for J, vb in bv.comps[p].items():
                if vb == 0.0:
                    continue
                if p == 0:
                    total += va * vb
                else:
                    gram = gi[np.ix_(list(I), list(J))]
                    total += va * vb * float(np.linalg.det(gram))
    return total


# --- differential operations ---------------------------------------------------


def exterior_d(omega: FormField) -> FormField:
    """Exterior derivative via the coordinate formula (exact jets)."""
    chart = omega.chart
    n = chart.n
    out: dict[int, dict[tuple, list]] = {}
    for p, row in omega.comps.items():
        if p >= n:
            continue
        for J, f in row.items():
            for i in range(n):
                if i in J:
                    continue
                merged = (i,) + J
                sign, I = sort_index(merged)
                out.setdefault(p + 1, {}).setdefault(I, []).append((float(sign), i, f))
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for deg, rows in out.items():
        comps[deg] = {}
        for I, terms in rows.items():
            def rule(pt, od, terms=terms):
                total = None
                for sign, i, f in terms:
                    term = f(pt, od + 1).derivative(i) * sign
                    total = term if total is None else total + term
                return total

            comps[deg][I] = _memoized(rule)
    return FormField(chart, comps)


def _covariant_coeff_jet(omega: FormField, p: int, idx: tuple, j: int, point: tuple, order: int):
    """Jet of (nabla_j omega)_idx = d_j omega_idx - sum_t Gamma^m_{j idx_t} omega_{..m..}."""
    chart = omega.chart
    mj = chart.metric_jets(point)
    base = omega.coeff_jet(p, idx, point, order + 1)
    total = None if base is None else base.derivative(j)
    for t in range(len(idx)):
        for m in range(chart.n):
            gam = mj.gamma[m][j][idx[t]]  # Gamma^m_{j, idx_t}
            swapped = idx[:t] + (m,) + idx[t + 1:]
            w = omega.coeff_jet(p, swapped, point, order)
            if w is None:
                continue
            term = gam.truncated(order) * w * (-1.0)
            total = term if total is None else total + term
    return total


def delta(omega: FormField) -> FormField:
    """Codifferential via covariant divergence:

        (delta omega)_{K} = -g^{jk} (nabla_j omega)_{k K}.

    Matches the nonnegative-Laplacian convention (delta(u dx) = -u' on the line).
    """
    chart = omega.chart
    n = chart.n
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for p, row in omega.comps.items():
        if p == 0 or not row:
            continue
        targets = set()
        for J in row:
            for t in range(len(J)):
                targets.add(J[:t] + J[t + 1:])
        deg = p - 1
        for K in targets:
            def rule(pt, od, K=K, p=p):
                mj = chart.metric_jets(pt)
                total = None
                for j in range(n):
                    for k in range(n):
                        nj = _covariant_coeff_jet(omega, p, (k,) + K, j, pt, od)
                        if nj is None:
                            continue
                        term = mj.ginv[j][k].truncated(od) * nj * (-1.0)
                        total = term if total is None else total + term
                if total is None:
                    total = Jet.constant(0.0, n, od)
                return total

            comps.setdefault(deg, {})[K] = _memoized(rule)
    return FormField(chart, comps)


def dirac(omega: FormField) -> FormField:
    """d + delta."""
    return exterior_d(omega) + delta(omega)


def hodge_laplacian(omega: FormField) -> FormField:
    """(d delta + delta d) omega; on 0-forms this is the Laplace-Beltrami."""
    return exterior_d(delta(omega)) + delta(exterior_d(omega))


# --- Hodge star -------------------------------------------------------------------


def _raised_coeff_jet(omega: FormField, p: int, I: tuple, point: tuple, order: int, mj) -> Jet | None:
    """omega^I = Lambda^p(g^{-1}) applied: sum_J det(g^{-1}[I,J]) omega_J."""
    n = omega.chart.n
    total = None
    row = omega.comps.get(p, {})
    for J in row:
        wj = omega.coeff_jet(p, J, point, order)
        if wj is None:
            continue
        sub = [[mj.ginv[a][b].truncated(order) for b in J] for a in I]
        det = _det_jet_local(sub, n, order)
        term = det * wj
        total = term if total is None else total + term
    return total


def _det_jet_local(m, n, order):
    if not m:
        return Jet.constant(1.0, n, order)
    if len(m) == 1:
        return m[0][0]
    total = None
    for j in range(len(m)):
        minor = [[m[r][c] for c in range(len(m)) if c != j] for r in range(1, len(m))]
        term = m[0][j] * _det_jet_local(minor, n, order)
        if j % 2 == 1:
            term = -term
        total = term if total is None else total + term
    return total


def star_field(omega: FormField) -> FormField:
    """Hodge star with orientation given by the coordinate order."""
    chart = omega.chart
    n = chart.n
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for p, row in omega.comps.items():
        if not row:
            continue
        deg = n - p
        for K in itertools.combinations(range(n), deg):
            def rule(pt, od, K=K, p=p):
                mj = chart.metric_jets(pt)
                total = None
                for I in itertools.combinations(range(n), p):
                    if set(I) & set(K):
                        continue
                    eps = perm_sign(I + K)
                    raised = _raised_coeff_jet(omega, p, I, pt, od, mj)
                    if raised is None:
                        continue
                    term = raised * float(eps)
                    total = term if total is None else total + term
                if total is None:
                    return Jet.constant(0.0, n, od)
                return total * mj.sqrt_det.truncated(od)

            comps.setdefault(deg, {})[K] = _memoized(rule)
    return FormField(chart, comps)


def hodge_star(omega: FormField, point) -> FormValue:
    return star_field(omega).at(point)


def delta_via_star(omega: FormField) -> FormField:
    """delta omega = (-1)^{n(p+1)+1} star d star omega, applied degree by degree."""
    chart = omega.chart
    n = chart.n
    total: FormField | None = None
    for p in omega.degrees():
        piece = FormField(chart, {p: dict(omega.comps[p])})
        sign = (-1.0) ** (n * (p + 1) + 1)
        part = star_field(exterior_d(star_field(piece))).scaled(sign)
        total = part if total is None else total + part
    return total if total is not None else FormField.zero(chart)


# --- derivations along vector fields ------------------------------------------------


def covariant_derivative(X: VectorField, omega: FormField, point) -> FormValue:
    """(nabla_X omega) at a point."""
    chart = omega.chart
    point = tuple(float(v) for v in point)
    xv = X.values(point)
    out: dict[int, dict[tuple, float]] = {}
    for p, row in omega.comps.items():
        vals = {}
        for idx in row:
            total = 0.0
            for j in range(chart.n):
                if xv[j] == 0.0:
                    continue
                nj = _covariant_coeff_jet(omega, p, idx, j, point, 0)
                if nj is not None:
                    total += xv[j] * nj.value
            vals[idx] = total
        out[p] = vals
    return FormValue(chart.n, out)


def covariant_derivative_field(X: VectorField, omega: FormField) -> FormField:
    """nabla_X omega as a lazy field (for operator composition)."""
    chart = omega.chart
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for p, row in omega.comps.items():
        for idx in row:
            def rule(pt, od, p=p, idx=idx):
                total = None
                for j in range(chart.n):
                    nj = _covariant_coeff_jet(omega, p, idx, j, pt, od)
                    if nj is None:
                        continue
                    term = X.jet(j, pt, od) * nj
                    total = term if total is None else total + term
                if total is None:
                    total = Jet.constant(0.0, chart.n, od)
                return total

            comps.setdefault(p, {})[idx] = _memoized(rule)
    return FormField(chart, comps)


def lie_derivative_field(X: VectorField, omega: FormField) -> FormField:
    """Cartan's formula: L_X = i_X d + d i_X."""
    return interior(X, exterior_d(omega)) + exterior_d(interior(X, omega))


def lie_derivative(X: VectorField, omega: FormField, point) -> FormValue:
    return lie_derivative_field(X, omega).at(point)


def lie_derivative_coordinate(X: VectorField, omega: FormField, point) -> FormValue:
    """Metric-free coordinate formula for L_X, as an independent route:

        (L_X omega)_J = X^j d_j omega_J + sum_t (d_{j_t} X^m) omega_{J: t -> m}.
    """
    chart = omega.chart
    n = chart.n
    point = tuple(float(v) for v in point)
    out: dict[int, dict[tuple, float]] = {}
    for p, row in omega.comps.items():
        vals: dict[tuple, float] = {}
        targets = set(row)
        for J in row:
            for t in range(len(J)):
                for m in range(n):
                    sign, s = sort_index(J[:t] + (m,) + J[t + 1:])
                    if sign != 0:
                        targets.add(s)
        for J in targets:
            total = 0.0
            base = omega.coeff_jet(p, J, point, 1)
            if base is not None:
                for j in range(n):
                    total += X.jet(j, point, 0).value * base.grad[j]
            for t in range(len(J)):
                dX = [X.jet(m, point, 1).grad[J[t]] for m in range(n)]
                for m in range(n):
                    if dX[m] == 0.0:
                        continue
                    w = omega.coeff_jet(p, J[:t] + (m,) + J[t + 1:], point, 0)
                    if w is not None:
                        total += dX[m] * w.value
            vals[J] = total
        out[p] = vals
    return FormValue(n, out)


def hessian_operator(f: ScalarField, omega: FormField, point) -> FormValue:
    """The zeroth-order Hessian derivation on forms:

        H_f omega|_x = sum_{ij} Hess f(X_i, X_j) phi^j wedge i_{X_i} omega

    over an orthonormal frame/coframe pair at x.
    """
    from .chart import frame_at, hessian

    chart = omega.chart
    point = tuple(float(v) for v in point)
    fr = frame_at(chart, point)
    H = hessian(chart, f, point)
    Hf = fr.frame.T @ H @ fr.frame  # Hess f(X_i, X_j)
    n = chart.n
    omv = omega.at(point)
    out = FormValue(n, {})
    for i in range(n):
        for j in range(n):
            c = Hf[i, j]
            if abs(c) < 1e-300:
                continue
            # phi^j wedge i_{X_i} omega with constant-coefficient frame data
            contrib: dict[int, dict[tuple, float]] = {}
            for p, vals in omv.comps.items():
                if p == 0:
                    continue
                for J, v in vals.items():
                    if v == 0.0:
                        continue
                    for t, jt in enumerate(J):
                        xcomp = fr.frame[jt, i]
                        if xcomp == 0.0:
                            continue
                        inner_idx = J[:t] + J[t + 1:]
                        inner_val = ((-1.0) ** t) * xcomp * v
                        for b in range(n):
                            phicomp = fr.coframe[j, b]
                            if phicomp == 0.0 or b in inner_idx:
                                continue
                            sign, tgt = sort_index((b,) + inner_idx)
                            contrib.setdefault(p, {}).setdefault(tgt, 0.0)
                            contrib[p][tgt] += sign * phicomp * inner_val
            out = out + FormValue(n, contrib).scaled(c)
    return out


def hessian_operator_field(f: ScalarField, omega: FormField) -> FormField:
    """H_f omega as a field, coefficients assembled pointwise (zeroth order in omega)."""
    chart = omega.chart
    n = chart.n
    degs = [p for p in omega.degrees() if p >= 1]
    comps: dict[int, dict[tuple, Coefficient]] = {}
    for p in degs:
        for idx in itertools.combinations(range(n), p):
            def rule(pt, od, p=p, idx=idx):
                if od > 0:
                    raise JetOrderError("hessian operator field supports order 0 only")
                val = hessian_operator(f, omega, pt).get(p, idx)
                return Jet.constant(val, n, 0)

            comps.setdefault(p, {})[idx] = _memoized(rule)
    return FormField(chart, comps)
