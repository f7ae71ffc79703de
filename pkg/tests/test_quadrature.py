import math
from fractions import Fraction

import numpy as np
import pytest

from formladder.chart import Chart
from formladder.quadrature import (
    QuadratureError,
    build_grid,
    gram_matrix,
    inner_product_mu,
    level_set_volume,
    moment_estimates,
    one_form_norm_identity_residual,
    state_form,
)
from formladder.sampling import bump_form
from formladder.states import excited_state
from formladder.weighted import LadderOperators, WeightSpec

R1 = Chart(["x"])
GAUSS1 = WeightSpec(R1, R1.scalar("-(1/2)*x^2"), alpha=1.0, gamma=0.0)

RXT2 = Chart(
    ["s", "x1", "x2"],
    metric=[["1", "0", "0"], ["0", "exp(s)", "0"], ["0", "0", "exp(-s)"]],
    periods=[None, 1.0, 1.0],
)

SQRT_PI = math.sqrt(math.pi)


def grid1(radius=12.0, nodes=200):
    return build_grid(R1, GAUSS1, radius=radius, nodes_unbounded=nodes)


def test_total_mass_is_gaussian_integral():
    # oracle: integral of e^{-x^2} dx = sqrt(pi)
    assert grid1().total_mass() == pytest.approx(SQRT_PI, rel=1e-13)


def test_mass_monotone_in_radius():
    masses = [build_grid(R1, GAUSS1, radius=r, nodes_unbounded=160).total_mass()
              for r in (2.0, 4.0, 8.0, 12.0)]
    assert all(masses[i] < masses[i + 1] + 1e-15 for i in range(len(masses) - 1))


def test_state_norms_match_gaussian_moments():
    # oracles: ||phi_0||^2 = sqrt(pi); ||phi_1||^2 = 2 int x^2 e^{-x^2} = sqrt(pi);
    # ||phi_2||^2 = int (1-2x^2)^2 e^{-x^2} = 2 sqrt(pi)
    ops = LadderOperators(GAUSS1)
    g = grid1()
    phi = [state_form(ops, excited_state(k, Fraction(1), Fraction(0))) for k in range(3)]
    assert inner_product_mu(g, phi[0], phi[0]) == pytest.approx(SQRT_PI, rel=1e-12)
    assert inner_product_mu(g, phi[1], phi[1]) == pytest.approx(SQRT_PI, rel=1e-12)
    assert inner_product_mu(g, phi[2], phi[2]) == pytest.approx(2 * SQRT_PI, rel=1e-12)
    assert abs(inner_product_mu(g, phi[0], phi[2])) < 1e-10


def test_gram_diagonal_and_norm_law():
    ops = LadderOperators(GAUSS1)
    G = gram_matrix(grid1(), ops, 6, alpha=Fraction(1), gamma=Fraction(0))
    diag = np.diag(G)
    off = np.max(np.abs(G - np.diag(diag)))
    assert off / np.min(np.abs(diag)) < 1e-8
    for k in range(7):
        assert diag[k] / (math.factorial(k) * SQRT_PI) == pytest.approx(1.0, rel=1e-7)


def test_gram_insensitive_to_node_doubling():
    ops = LadderOperators(GAUSS1)
    a = gram_matrix(grid1(nodes=200), ops, 3, alpha=Fraction(1), gamma=Fraction(0))
    b = gram_matrix(grid1(nodes=400), ops, 3, alpha=Fraction(1), gamma=Fraction(0))
    assert np.max(np.abs(a - b)) < 1e-10


def test_gram_insensitive_to_radius_growth():
    # beyond ~8 standard deviations the Gaussian tail is numerically dead
    ops = LadderOperators(GAUSS1)
    a = gram_matrix(grid1(radius=9.0), ops, 3, alpha=Fraction(1), gamma=Fraction(0))
    b = gram_matrix(grid1(radius=13.0), ops, 3, alpha=Fraction(1), gamma=Fraction(0))
    assert np.max(np.abs(a - b)) < 1e-12


def test_moments_converge_for_gaussian():
    ests = moment_estimates(R1, GAUSS1, 4, radius=10.0)
    assert all(e.converged for e in ests)
    assert ests[0].value == pytest.approx(SQRT_PI, rel=1e-10)
    # oracle for j=1: int |x^2/2| e^{-x^2} = sqrt(pi)/4
    assert ests[1].value == pytest.approx(SQRT_PI / 4, rel=1e-9)


def test_moments_diverge_for_directional_weight_on_plane():
    chart = Chart(["x", "y"])
    w = WeightSpec(chart, chart.scalar("-(1/2)*x^2"), alpha=1.0, gamma=0.0)
    ests = moment_estimates(chart, w, 2, radius=8.0, nodes_unbounded=60)
    assert not any(e.converged for e in ests)


def test_one_form_norm_identity():
    ops = LadderOperators(GAUSS1)
    for j in (0, 1, 2):
        assert abs(one_form_norm_identity_residual(grid1(), ops, j)) < 1e-8


def test_weighted_adjointness_on_bumps():
    rng = np.random.default_rng(61)
    ops = LadderOperators(GAUSS1)
    g = build_grid(R1, GAUSS1, radius=4.0, nodes_unbounded=300)
    omega = bump_form(rng, R1, [0.2], 2.0)
    nu = bump_form(rng, R1, [-0.3], 2.0)
    lhs = inner_product_mu(g, ops.annihilate(omega), nu)
    rhs = inner_product_mu(g, omega, ops.create(nu))
    assert lhs == pytest.approx(rhs, abs=1e-7 * max(1.0, abs(lhs)))


def test_level_set_volumes_constant_on_volume_preserving_metric():
    vols = level_set_volume(RXT2, 0, [0.5, 1.0, 1.5, 2.0])
    assert np.max(vols) - np.min(vols) < 1e-9
    assert vols[0] == pytest.approx(1.0, abs=1e-12)  # unit torus area


def test_level_set_volumes_vary_on_control_metric():
    control = Chart(
        ["s", "x1", "x2"],
        metric=[["1", "0", "0"], ["0", "exp(s)", "0"], ["0", "0", "1"]],
        periods=[None, 1.0, 1.0],
    )
    vols = level_set_volume(control, 0, [0.5, 1.0, 1.5])
    # oracle: slice density sqrt(e^s) = e^{s/2}
    assert vols[0] == pytest.approx(math.exp(0.25), rel=1e-12)
    assert np.max(vols) - np.min(vols) > 0.1


def test_level_set_volume_euclidean_product():
    chart = Chart(["x", "y"], domain=[(None, None), (0.0, 2.0)])
    vols = level_set_volume(chart, 0, [0.3, 0.9, 1.7])
    assert np.allclose(vols, 2.0, atol=1e-12)


def test_level_set_rejects_cross_terms():
    skew = Chart(["s", "y"], metric=[["1", "(1/4)*s"], ["(1/4)*s", "1"]],
                 domain=[(None, None), (0.0, 1.0)])
    with pytest.raises(QuadratureError, match="cross terms"):
        level_set_volume(skew, 0, [0.5])
