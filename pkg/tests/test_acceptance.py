"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to stream them).
"""

import math
from fractions import Fraction

import numpy as np

from formladder.checks import (
    Scenario,
    bochner_random_charts,
    check_conditions_scenario,
    check_distance,
    check_gram,
    check_hessian_bound,
    check_spectrum,
    commutator_random_charts,
    identity_suite,
)
from formladder.config import load_preset
from formladder.heat import circle_log_curvature_spread, heat_residuals, line_varadhan_defect
from formladder.quadrature import level_set_volume
from formladder.states import (
    QSqrt2,
    annihilate_table,
    commutator_table,
    excited_state,
    number_table,
)

CONSTANT_PAIRS = [(Fraction(1), Fraction(0)), (Fraction(3, 2), Fraction(2)), (Fraction(2), Fraction(-1))]


def _report(criterion: str, passed: bool, detail: str = "") -> None:
    mark = "PASS" if passed else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {criterion}: {mark}{suffix}")
    assert passed, f"{criterion} failed{suffix}"


def scenario(name: str) -> Scenario:
    return Scenario.compile(load_preset(name))


def test_c01_exact_ladder_suite():
    ok = True
    for alpha, gamma in CONSTANT_PAIRS:
        for k in range(13):
            phi = excited_state(k, alpha, gamma)
            ok &= number_table(phi, alpha, gamma).same_as(phi.scaled(QSqrt2.of(alpha * k)))
            ok &= commutator_table(phi, alpha, gamma).same_as(phi.scaled(QSqrt2.of(alpha)))
            if k >= 1:
                down = annihilate_table(phi, alpha, gamma)
                ok &= down.same_as(excited_state(k - 1, alpha, gamma).scaled(QSqrt2.of(alpha * k)))
    _report("1 exact ladder (zero residual, k<=12, three constant pairs)", ok)


def test_c02_commutator_two_path_200_draws():
    res = commutator_random_charts(200, seed=0, dims=(1, 2, 3), tolerance=1e-7)
    _report("2 commutator two-path residual < 1e-7 on 200 draws", res.status == "pass",
            f"max {res.max_residual:.2e}")


def test_c03_identity_battery_100_trials():
    res = identity_suite(100, seed=0, dims=(1, 2, 3, 4), tolerance=1e-8)
    worst = max(v["max"] for k, v in res.details.items() if isinstance(v, dict))
    _report("3 exterior-calculus identity suite < 1e-8, 100 trials, dims 1-4",
            res.status == "pass", f"worst {worst:.2e}")


def test_c04_gram_and_norm_law():
    sc = scenario("r1-gaussian")
    res = check_gram(sc)
    off = res.max_residual
    norm_rel = res.details["norm_law_max_relative"]
    mass_ok = abs(res.details["total_mass"] - math.sqrt(math.pi)) < 1e-7
    _report("4 Gram diagonal (off/diag < 1e-8) and norm law (rel 1e-7)",
            res.status == "pass" and off < 1e-8 and norm_rel < 1e-7 and mass_ok,
            f"off/diag {off:.2e}, norm rel {norm_rel:.2e}")


def test_c05_fd_spectrum_line():
    sc = scenario("r1-gaussian")
    res = check_spectrum(sc)
    max_err = res.details["max_error"]
    second = res.details["second_order_convergence"]
    _report("5 FD spectrum within 2e-3 of {0..4} at n=2000, second-order convergence",
            res.status == "pass" and max_err < 2e-3 and second,
            f"max err {max_err:.2e}")


def test_c06_condition_checker_presets():
    ok_dir = True
    for name in ("r2-directional", "rxt2-volume-preserving"):
        sc = scenario(name)
        sc.config.tolerances.conditions = 1e-10
        res = check_conditions_scenario(sc)
        ok_dir &= res.status == "pass" and res.max_residual < 1e-10
    sc = scenario("r2-gaussian")
    res = check_conditions_scenario(sc)
    incompat = res.details.get("incompatibility", "")
    gauss_fails = res.status == "fail" and "alpha = 2" in incompat and "alpha = 1" in incompat
    _report("6 conditions pass on admissible presets (<1e-10, 1000 samples) and "
            "fail on the plane Gaussian with the alpha clash", ok_dir and gauss_fails)


def test_c07_distance_round_trip():
    ok = True
    detail = []
    for name in ("r1-gaussian", "rxt2-volume-preserving"):
        sc = scenario(name)
        res = check_distance(sc)
        ok &= res.status == "pass"
        ok &= res.details["roundtrip_max"] < 1e-12
        ok &= res.details["harmonic_max"] < 1e-7
        ok &= res.details["unit_gradient_max"] < 1e-9
        detail.append(f"{name}: rt {res.details['roundtrip_max']:.1e}")
    _report("7 weight/distance round trip (1e-12) with harmonic (1e-7) and "
            "unit-gradient (1e-9) residuals", ok, "; ".join(detail))


def test_c08_hessian_growth_bound():
    ok = True
    for name in ("r1-gaussian", "rxt2-volume-preserving"):
        sc = scenario(name)
        main, _evidence = check_hessian_bound(sc)
        ok &= main.status == "pass" and main.max_residual < 1e-8
        ok &= main.details["bound_worst_slack"] <= 1e-8
    _report("8 Hessian identity (1e-8) and growth bound with c1, c2 from the "
            "curvature constant", ok)


def test_c09_heat_demo():
    ts = [0.1, 0.01, 0.001]
    rows = heat_residuals("line", ts, [0.3, 1.0, 2.2])
    var_ok = all(abs(r.varadhan_residual - line_varadhan_defect(r.t)) < 1e-12 for r in rows)
    defects = [abs(line_varadhan_defect(t)) for t in ts]
    decreasing = defects[0] > defects[1] > defects[2]
    ident_ok = all(abs(r.identity_residual) < 1e-10 for r in rows)
    spread = circle_log_curvature_spread(0.5)
    _report("9 heat demo: line residual equals -(t/2)log(2 pi t) to 1e-12 and "
            "decreases; identity < 1e-10; circle spread > 0.01",
            var_ok and decreasing and ident_ok and spread > 0.01,
            f"spread {spread:.3f}")


def test_c10_bochner_and_level_sets():
    boch = bochner_random_charts(50, seed=0, dims=(1, 2, 3), tolerance=1e-6)
    sc = scenario("rxt2-volume-preserving")
    vols = level_set_volume(sc.chart, 0, [0.5, 1.0, 1.5, 2.0])
    const_ok = (np.max(vols) - np.min(vols)) / abs(np.mean(vols)) < 1e-9
    control = Scenario.compile(load_preset("rxt2-control"))
    cvols = level_set_volume(control.chart, 0, [0.5, 1.0, 1.5])
    varying_ok = (np.max(cvols) - np.min(cvols)) > 1e-3
    _report("10 Bochner < 1e-6 on 50 draws; level-set volumes constant (1e-9) "
            "on the volume-preserving chart, non-constant on the control",
            boch.status == "pass" and const_ok and varying_ok,
            f"bochner max {boch.max_residual:.2e}")
