import math

import pytest

from formladder.heat import (
    circle_log_curvature_spread,
    heat_residuals,
    line_varadhan_defect,
)


def test_line_varadhan_residual_closed_form():
    # h_t(x) = -x^2/2 - (t/2) log(2 pi t), so the defect is x-independent
    for t in (0.1, 0.01, 0.001):
        rows = heat_residuals("line", [t], [0.2, 0.9, 1.7])
        for r in rows:
            assert r.varadhan_residual == pytest.approx(line_varadhan_defect(t), abs=1e-12)


def test_line_defect_decreases_with_time():
    defects = [abs(line_varadhan_defect(t)) for t in (0.1, 0.01, 0.001)]
    assert defects[0] > defects[1] > defects[2]


def test_line_identity_residual_is_rounding():
    rows = heat_residuals("line", [0.1, 0.01], [0.3, 1.2, 2.5])
    for r in rows:
        assert abs(r.identity_residual) < 1e-10


def test_circle_identity_residual_is_rounding():
    rows = heat_residuals("circle", [0.5, 0.1, 0.02], [0.3, 1.5, 3.0])
    for r in rows:
        assert abs(r.identity_residual) < 1e-10


def test_circle_second_log_derivative_not_constant():
    spread = circle_log_curvature_spread(0.5)
    assert spread > 0.01


def test_circle_approaches_line_at_small_time():
    # far from the cut locus and at small t the wrap-around images are dead
    line = heat_residuals("line", [0.01], [0.4])[0]
    circle = heat_residuals("circle", [0.01], [0.4])[0]
    assert circle.varadhan_residual == pytest.approx(line.varadhan_residual, abs=1e-12)


def test_circle_distance_wraps():
    L = 2 * math.pi
    rows = heat_residuals("circle", [0.05], [L - 0.4])
    # geodesic distance to the basepoint is 0.4, not L - 0.4
    assert rows[0].varadhan_residual - line_varadhan_defect(0.05) == pytest.approx(0.0, abs=1e-6)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        heat_residuals("plane", [0.1], [0.0])
