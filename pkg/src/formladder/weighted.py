"""Ladder operators on form spaces weighted by d(mu) = e^{2h} dx.

The annihilation operator is 2^{-1/2}(d + delta); its formal adjoint in the
weighted space picks up the Clifford action of grad h:

    create = 2^{-1/2} (d + delta + 2 (dh wedge - i_{grad h})).

The commutator of the pair is first order with zeroth-order part lap h, and
acts as multiplication by lap h on the kernel of (dh wedge - i_{grad h})(d+delta)
+ nabla_{grad h}. The weight is admissible exactly when lap h and
alpha h + |grad h|^2 / 2 are constant, which is also equivalent to the existence
of a harmonic unit-gradient distance function r with h = -(alpha/2) r^2 + gamma/alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .chart import (
    Chart,
    ScalarField,
    grad_norm2_field,
    hessian_norm2,
    laplace_beltrami,
    laplacian_jet,
    metric_at,
)
from .forms import (
    FormField,
    FormValue,
    covariant_derivative,
    differential,
    dirac,
    gradient_field,
    hessian_operator,
    hodge_laplacian,
    interior,
    lie_derivative_field,
    wedge,
)
from .jets import DomainError

SQRT_HALF = math.sqrt(0.5)


class WeightError(ValueError):
    pass


@dataclass
class WeightSpec:
    """The weight h with its ladder constants; alpha > 0 when supplied."""

    chart: Chart
    h: ScalarField
    alpha: Optional[float] = None
    gamma: Optional[float] = None

    def __post_init__(self):
        if self.alpha is not None and self.alpha <= 0:
            raise WeightError(f"alpha must be positive, got {self.alpha}")


class LadderOperators:
    """Operator suite attached to a weight. All applications are lazy fields."""

    def __init__(self, weight: WeightSpec):
        self.weight = weight
        self.chart = weight.chart
        self.h = weight.h
        self.dh = differential(weight.h)
        self.grad_h = gradient_field(weight.chart, weight.h)

    # --- first-order building blocks -------------------------------------

    def clifford(self, omega: FormField) -> FormField:
        """Clifford action of grad h: dh wedge omega - i_{grad h} omega."""
        return wedge(self.dh, omega) - interior(self.grad_h, omega)

    def annihilate(self, omega: FormField) -> FormField:
        return dirac(omega).scaled(SQRT_HALF)

    def create(self, omega: FormField) -> FormField:
        return (dirac(omega) + self.clifford(omega).scaled(2.0)).scaled(SQRT_HALF)

    def number(self, omega: FormField) -> FormField:
        """N = (1/2)(d delta + delta d) + (dh wedge - i_{grad h})(d + delta)."""
        return hodge_laplacian(omega).scaled(0.5) + self.clifford(dirac(omega))

    def dirac_mu(self, omega: FormField) -> FormField:
        """The weighted-space symmetric Dirac operator d + delta - 2 i_{grad h}."""
        return dirac(omega) - interior(self.grad_h, omega).scaled(2.0)

    def laplacian_mu(self, omega: FormField) -> FormField:
        """Witten-style weighted Laplacian as the literal square of dirac_mu."""
        return self.dirac_mu(self.dirac_mu(omega))

    def laplacian_mu_lie(self, omega: FormField) -> FormField:
        """Independent route: laplacian - 2 L_{grad h} (for cross-checking)."""
        return hodge_laplacian(omega) - lie_derivative_field(self.grad_h, omega).scaled(2.0)

    def hessian_action(self, omega: FormField, point) -> FormValue:
        return hessian_operator(self.h, omega, point)

    def number_hat(self, omega: FormField, point) -> FormValue:
        """The extension (1/2) laplacian_mu + H_h, evaluated pointwise."""
        return self.laplacian_mu(omega).at(point).scaled(0.5) + self.hessian_action(omega, point)

    # --- residual diagnostics --------------------------------------------

    def commutator_apply(self, omega: FormField) -> FormField:
        """[A, A+] omega by literal double application."""
        return self.annihilate(self.create(omega)) - self.create(self.annihilate(omega))

    def commutator_rhs(self, omega: FormField, point) -> FormValue:
        """-2 {(dh wedge - i_{grad h})(d+delta) + nabla_{grad h}} omega + (lap h) omega."""
        point = tuple(float(v) for v in point)
        first = self.clifford(dirac(omega)).at(point) + covariant_derivative(self.grad_h, omega, point)
        lap_h = laplace_beltrami(self.chart, self.h, point)
        return first.scaled(-2.0) + omega.at(point).scaled(lap_h)

    def commutator_residual(self, omega: FormField, point) -> FormValue:
        point = tuple(float(v) for v in point)
        return self.commutator_apply(omega).at(point) - self.commutator_rhs(omega, point)

    def invariance_residual(self, omega: FormField, point) -> FormValue:
        """((dh wedge - i_{grad h})(d+delta) + nabla_{grad h}) omega.

        Zero at a point iff omega sits (there) in the subspace on which the
        ladder commutator is multiplication by lap h.
        """
        point = tuple(float(v) for v in point)
        return self.clifford(dirac(omega)).at(point) + covariant_derivative(self.grad_h, omega, point)

    # --- ground-state / Schrodinger form ----------------------------------

    def schrodinger_potential(self, reduced: bool = True) -> ScalarField:
        """Scalar potential of the conjugated operator e^h N e^{-h} = lap/2 + V.

        With admissible constants, V = -alpha h - alpha/2 + gamma (bounded below
        by -alpha/2). Without them, the general form |dh|^2/2 - (lap h)/2 is used.
        """
        if reduced:
            alpha, gamma = self.weight.alpha, self.weight.gamma
            if alpha is None or gamma is None:
                raise WeightError("reduced potential needs alpha and gamma")
            h = self.h

            def rule(point, order):
                return h.jet(point, order) * (-alpha) + (gamma - alpha / 2.0)

            return ScalarField(self.chart, rule=rule, name="schrodinger potential")
        energy = grad_norm2_field(self.chart, self.h)
        chart, h = self.chart, self.h

        def rule(point, order):
            lap = laplacian_jet(chart, h, point, min(order, 1))
            return energy.jet(point, order) * 0.5 - lap * 0.5

        return ScalarField(self.chart, rule=rule, name="schrodinger potential (general)")

    def exp_weight_field(self, scale: float) -> ScalarField:
        """e^{scale * h} as a derived field."""
        h = self.h

        def rule(point, order):
            hj = h.jet(point, order) * scale
            e = math.exp(hj.value)
            return hj.apply(e, e, e, e)

        return ScalarField(self.chart, rule=rule, name=f"exp({scale}*h)")

    def ground_state_conjugate(self, chi: FormField, point) -> FormValue:
        """(U N_hat U^{-1}) chi at a point, with U: omega -> e^h omega."""
        point = tuple(float(v) for v in point)
        val = self.number_hat(chi.scaled_by_field(self.exp_weight_field(-1.0)), point)
        return val.scaled(math.exp(self.h.jet(point, 0).value))


# --- weight conditions -------------------------------------------------------


@dataclass
class ConditionEntry:
    name: str
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    fitted: dict = field(default_factory=dict)
    note: str = ""


@dataclass
class ConditionReport:
    entries: list[ConditionEntry]
    alpha: Optional[float] = None
    gamma: Optional[float] = None
    incompatibility: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries) and self.incompatibility is None

    def entry(self, name: str) -> ConditionEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def check_conditions(weight: WeightSpec, samples: Sequence[tuple], tolerance: float = 1e-8) -> ConditionReport:
    """Residuals of lap h = alpha and alpha h + |grad h|^2/2 = gamma over samples.

    Unset constants are fitted by first-sample anchoring. The second condition
    is additionally fitted on its own by least squares; if both conditions are
    individually consistent but demand different alphas, the report carries an
    incompatibility message instead of a silent failure.
    """
    samples = [tuple(float(v) for v in p) for p in samples]
    if not samples:
        raise WeightError("need at least one sample point")
    chart, h = weight.chart, weight.h
    energy = grad_norm2_field(chart, h)
    laps = np.array([laplace_beltrami(chart, h, p) for p in samples])
    hvals = np.array([h(p) for p in samples])
    evals = np.array([energy(p) for p in samples])

    alpha = weight.alpha if weight.alpha is not None else float(laps[0])
    res1 = np.abs(laps - alpha)
    w = alpha * hvals + 0.5 * evals
    gamma = weight.gamma if weight.gamma is not None else float(w[0])
    res2 = np.abs(w - gamma)

    e1 = ConditionEntry(
        "laplacian_constant", float(res1.max()), float(res1.mean()), tolerance,
        bool(res1.max() < tolerance),
        fitted={} if weight.alpha is not None else {"alpha": alpha},
    )
    e2 = ConditionEntry(
        "eikonal_level", float(res2.max()), float(res2.mean()), tolerance,
        bool(res2.max() < tolerance),
        fitted={} if weight.gamma is not None else {"gamma": gamma},
    )

    entries = [e1, e2]
    if e2.passed:
        # where the level condition holds, the weight stays below gamma/alpha
        # (the gradient-energy term is nonnegative); sampled sanity check
        overshoot = np.maximum(hvals - gamma / alpha, 0.0)
        entries.append(ConditionEntry(
            "level_bound", float(overshoot.max()), float(overshoot.mean()), tolerance,
            bool(overshoot.max() < tolerance),
            note="sampled overshoot of h above gamma/alpha",
        ))

    incompat = None
    if not (e1.passed and e2.passed) and weight.alpha is None:
        # independent fit of condition 2: alpha h + |grad h|^2/2 = gamma is a
        # linear model  |grad h|^2/2 = gamma - alpha h
        A = np.vstack([np.ones_like(hvals), -hvals]).T
        coef, *_ = np.linalg.lstsq(A, 0.5 * evals, rcond=None)
        gamma2, alpha2 = float(coef[0]), float(coef[1])
        res2_own = np.abs(alpha2 * hvals + 0.5 * evals - gamma2)
        if res1.max() < tolerance and res2_own.max() < tolerance and abs(alpha2 - alpha) > tolerance:
            incompat = (
                f"conditions are individually consistent but incompatible: the Laplacian forces "
                f"alpha = {alpha:.6g} while the level condition forces alpha = {alpha2:.6g} "
                f"(gamma = {gamma2:.6g}); no single alpha satisfies both"
            )
            e2.fitted.update({"alpha_from_level_condition": alpha2, "gamma_from_level_condition": gamma2})

    return ConditionReport(entries, alpha=alpha, gamma=gamma, incompatibility=incompat)


def check_distance_conditions(chart: Chart, r: ScalarField, samples: Sequence[tuple],
                              tolerance: float = 1e-7, min_r: float = 1e-6) -> ConditionReport:
    """Residuals of lap r = 0 and |grad r| = 1, skipping the critical set |r| < min_r."""
    kept = [tuple(float(v) for v in p) for p in samples if abs(r(tuple(float(v) for v in p))) > min_r]
    if not kept:
        raise WeightError("all samples fall inside the excluded critical set")
    energy = grad_norm2_field(chart, r)
    res_h = np.array([abs(laplace_beltrami(chart, r, p)) for p in kept])
    res_g = np.array([abs(math.sqrt(energy(p)) - 1.0) for p in kept])
    e1 = ConditionEntry("harmonic", float(res_h.max()), float(res_h.mean()), tolerance, bool(res_h.max() < tolerance))
    e2 = ConditionEntry("unit_gradient", float(res_g.max()), float(res_g.mean()), tolerance, bool(res_g.max() < tolerance))
    return ConditionReport([e1, e2])


def distance_from_weight(weight: WeightSpec) -> ScalarField:
    """r = sqrt(-(2/alpha)(h - gamma/alpha)); needs h <= gamma/alpha."""
    alpha, gamma = weight.alpha, weight.gamma
    if alpha is None or gamma is None:
        raise WeightError("distance conversion needs alpha and gamma")
    h, chart = weight.h, weight.chart
    level = gamma / alpha

    def rule(point, order):
        hj = h.jet(point, order)
        t = (hj * (-2.0 / alpha)) + (2.0 / alpha * level)
        if t.value <= 0.0:
            raise DomainError(
                f"h exceeds gamma/alpha at {point} (h={hj.value}, gamma/alpha={level}); no real distance"
            )
        rt = math.sqrt(t.value)
        return t.apply(rt, 0.5 / rt, -0.25 / (t.value * rt), 0.375 / (t.value**2 * rt))

    return ScalarField(chart, rule=rule, name="distance from weight")


def weight_from_distance(chart: Chart, r: ScalarField, alpha: float, gamma: float) -> ScalarField:
    """h = -(alpha/2) r^2 + gamma/alpha."""

    def rule(point, order):
        rj = r.jet(point, order)
        return rj * rj * (-alpha / 2.0) + (gamma / alpha)

    return ScalarField(chart, rule=rule, name="weight from distance")


def hessian_bound_residual(weight: WeightSpec, c: float, point) -> dict:
    """Pointwise data for the Hessian growth bound under Ric >= -cI.

    Returns the identity residual |Hess h|^2 - (alpha^2 - Ric(grad h, grad h))
    and the bound slack |Hess h|^2 - (c1 + c2 h), c1 = alpha^2 + 2 c gamma,
    c2 = -2 c alpha (slack <= 0 when the curvature bound holds).
    """
    alpha, gamma = weight.alpha, weight.gamma
    if alpha is None or gamma is None:
        raise WeightError("the Hessian bound needs alpha and gamma")
    point = tuple(float(v) for v in point)
    chart, h = weight.chart, weight.h
    H2 = hessian_norm2(chart, h, point)
    data = metric_at(chart, point)
    gradh = data.ginv @ h.jet(point, 1).grad
    ric_term = float(gradh @ data.ricci @ gradh)
    c1 = alpha**2 + 2.0 * c * gamma
    c2 = -2.0 * c * alpha
    return {
        "identity_residual": H2 - (alpha**2 - ric_term),
        "bound_slack": H2 - (c1 + c2 * h(point)),
        "hessian_norm2": H2,
        "ricci_term": ric_term,
    }


def ricci_lower_bound_estimate(chart: Chart, samples: Sequence[tuple]) -> float:
    """Sampled min eigenvalue of Ricci relative to g (heuristic, evidence only)."""
    worst = math.inf
    for p in samples:
        data = metric_at(chart, tuple(float(v) for v in p))
        vals = np.linalg.eigvalsh(np.linalg.solve(data.g, data.ricci))
        worst = min(worst, float(vals.min()))
    return worst
