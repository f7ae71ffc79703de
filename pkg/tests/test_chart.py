import math

import numpy as np
import pytest

from formladder.chart import (
    Chart,
    ChartError,
    bochner_residual,
    frame_at,
    gradient,
    hessian,
    hessian_norm2,
    laplace_beltrami,
    metric_at,
)
from formladder.sampling import halton_points, random_chart, random_point, random_scalar

SPHERE = Chart(
    ["theta", "phi"],
    metric=[["1", "0"], ["0", "sin(theta)^2"]],
    domain=[(0.05, math.pi - 0.05), (None, None)],
    periods=[None, 2 * math.pi],
)

RXT2 = Chart(
    ["s", "x1", "x2"],
    metric=[["1", "0", "0"], ["0", "exp(s)", "0"], ["0", "0", "exp(-s)"]],
    periods=[None, 1.0, 1.0],
)


def test_flat_chart_has_no_curvature_data():
    chart = Chart(["x", "y"])
    data = metric_at(chart, (0.3, -0.8))
    assert np.max(np.abs(data.gamma)) == 0.0
    assert np.max(np.abs(data.ricci)) == 0.0
    assert data.sqrt_det == 1.0


def test_rxt2_unit_volume_density():
    # det g = f * (1/f) = 1 by hand
    data = metric_at(RXT2, (0.0, 0.2, 0.7))
    assert data.sqrt_det == pytest.approx(1.0, abs=1e-12)
    data = metric_at(RXT2, (1.3, 0.2, 0.7))
    assert data.sqrt_det == pytest.approx(1.0, abs=1e-12)


def test_sphere_christoffel_against_classical_formula():
    # oracle: Gamma^theta_{phi phi} = -sin(theta) cos(theta), Gamma^phi_{theta phi} = cot(theta)
    theta = 1.1
    data = metric_at(SPHERE, (theta, 0.4))
    assert data.gamma[0, 1, 1] == pytest.approx(-math.sin(theta) * math.cos(theta), abs=1e-12)
    assert data.gamma[1, 0, 1] == pytest.approx(1 / math.tan(theta), abs=1e-12)
    # at the equator the first symbol vanishes
    eq = metric_at(SPHERE, (math.pi / 2, 0.4))
    assert eq.gamma[0, 1, 1] == pytest.approx(0.0, abs=1e-12)


def test_sphere_ricci_is_the_metric():
    theta = 0.9
    data = metric_at(SPHERE, (theta, 1.2))
    assert np.allclose(data.ricci, data.g, atol=1e-9)


def test_metric_inverse_identity():
    rng = np.random.default_rng(5)
    for dim in (1, 2, 3):
        chart = random_chart(rng, dim)
        p = random_point(rng, chart)
        data = metric_at(chart, p)
        assert np.max(np.abs(data.g @ data.ginv - np.eye(dim))) < 1e-12


def test_non_spd_metric_rejected():
    chart = Chart(["x"], metric=[["-1"]])
    with pytest.raises(ChartError):
        metric_at(chart, (0.0,))


def test_gradient_euclidean_line():
    chart = Chart(["x"])
    u = chart.scalar("x")
    assert gradient(chart, u, (0.4,))[0] == pytest.approx(1.0)


def test_gradient_uses_inverse_metric():
    h = RXT2.scalar("-(1/2)*s^2")
    g = gradient(RXT2, h, (0.7, 0.1, 0.2))
    assert np.allclose(g, [-0.7, 0.0, 0.0], atol=1e-13)


def test_gradient_norm_gaussian_plane():
    chart = Chart(["x", "y"])
    h = chart.scalar("-(1/2)*(x^2 + y^2)")
    g = gradient(chart, h, (1.0, 1.0))
    data = metric_at(chart, (1.0, 1.0))
    assert float(g @ data.g @ g) == pytest.approx(2.0, abs=1e-12)


def test_laplacian_sign_convention():
    chart = Chart(["x"])
    u = chart.scalar("x^2")
    assert laplace_beltrami(chart, u, (0.9,)) == pytest.approx(-2.0, abs=1e-12)


def test_laplacian_single_direction_weight():
    # lap of -(a/2) x^2 on flat space is a
    chart = Chart(["x", "y", "z"])
    h = chart.scalar("-(3/2)*x^2")
    assert laplace_beltrami(chart, h, (0.2, 0.5, -1.0)) == pytest.approx(3.0, abs=1e-12)


def test_laplacian_gaussian_weight_is_dimension():
    chart = Chart(["x", "y", "z"])
    hg = chart.scalar("-(1/2)*(x^2 + y^2 + z^2)")
    assert laplace_beltrami(chart, hg, (0.3, -0.4, 0.8)) == pytest.approx(3.0, abs=1e-12)


def test_hessian_flat():
    chart = Chart(["x"])
    assert hessian(chart, chart.scalar("x^2"), (0.7,))[0, 0] == pytest.approx(2.0)


def test_hessian_norm_equals_alpha_squared_on_line():
    chart = Chart(["x"])
    h = chart.scalar("-(1/2)*x^2")
    assert hessian_norm2(chart, h, (1.3,)) == pytest.approx(1.0, abs=1e-12)


def test_hessian_trace_is_minus_laplacian():
    rng = np.random.default_rng(11)
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        chart = random_chart(rng, dim)
        u = random_scalar(rng, chart, degree=3)
        p = random_point(rng, chart)
        data = metric_at(chart, p)
        tr = float(np.sum(data.ginv * hessian(chart, u, p)))
        lap = laplace_beltrami(chart, u, p)
        assert abs(tr + lap) < 1e-9 * max(1.0, abs(lap))


def test_bochner_flat_polynomial():
    chart = Chart(["x", "y"])
    u = chart.scalar("x^3 + x*y^2 - 2*y")
    assert abs(bochner_residual(chart, u, (0.3, 0.8))) < 1e-9


def test_bochner_curved_weight():
    h = RXT2.scalar("-(1/2)*s^2")
    assert abs(bochner_residual(RXT2, h, (0.4, 0.1, 0.9))) < 1e-9


def test_bochner_constant_field():
    chart = Chart(["x", "y"])
    assert bochner_residual(chart, chart.scalar("3"), (0.1, 0.2)) == 0.0


def test_torus_laplacian_integrates_to_zero():
    # Green's identity on a closed manifold: the integral of lap h vanishes
    torus = Chart(
        ["x", "y"],
        metric=[["1 + (3/10)*sin(x)", "0"], ["0", "1"]],
        periods=[2 * math.pi, 2 * math.pi],
    )
    h = torus.scalar("sin(x) + cos(2*y)")
    m = 48
    total = 0.0
    for i in range(m):
        for j in range(m):
            p = (2 * math.pi * i / m, 2 * math.pi * j / m)
            total += laplace_beltrami(torus, h, p) * metric_at(torus, p).sqrt_det
    total *= (2 * math.pi / m) ** 2
    assert abs(total) < 1e-8


def test_frame_orthonormality():
    rng = np.random.default_rng(21)
    for _ in range(10):
        chart = random_chart(rng, 3)
        p = random_point(rng, chart)
        fr = frame_at(chart, p)
        gram = fr.frame.T @ fr.metric.g @ fr.frame
        assert np.max(np.abs(gram - np.eye(3))) < 1e-12
        pairing = fr.coframe @ fr.frame
        assert np.max(np.abs(pairing - np.eye(3))) < 1e-12


def test_chart_validation_catches_period_violation():
    bad = Chart(["x"], metric=[["1 + (1/10)*sin(x)"]], periods=[1.0])
    with pytest.raises(ChartError, match="not invariant"):
        bad.validate([(0.3,)])


def test_chart_validation_accepts_periodic_metric():
    good = Chart(["x"], metric=[["1 + (1/10)*sin(x)"]], periods=[2 * math.pi])
    good.validate(halton_points(good, 8))
