import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from formladder.expr import parse
from formladder.jets import DomainError, JetOrderError, eval_jet
from formladder.sampling import _poly_ast


def jet_of(text, point, order, coords=None):
    coords = coords or tuple(f"x{i}" for i in range(len(point)))
    return eval_jet(parse(text, coords), point, tuple(coords), order)


def test_square_at_two():
    j = jet_of("x0^2", (2.0,), 2)
    assert j.value == 4.0
    assert j.grad[0] == 4.0
    assert j.hess[0, 0] == 2.0


def test_exp_all_orders_one():
    j = jet_of("exp(x0)", (0.0,), 3)
    assert j.value == j.grad[0] == j.hess[0, 0] == j.third[0, 0, 0] == 1.0


def test_negative_half_square():
    j = jet_of("-(1/2)*x0^2", (1.0,), 2)
    assert (j.value, j.grad[0], j.hess[0, 0]) == (-0.5, -1.0, -1.0)


def test_order_cap():
    with pytest.raises(JetOrderError):
        jet_of("x0", (1.0,), 4)


def test_domain_errors():
    with pytest.raises(DomainError):
        jet_of("log(x0)", (-1.0,), 1)
    with pytest.raises(DomainError):
        jet_of("sqrt(x0)", (0.0,), 1)
    with pytest.raises(DomainError):
        jet_of("abs(x0)", (0.0,), 1)
    # abs away from zero is fine
    j = jet_of("abs(x0)", (-2.0,), 2)
    assert (j.value, j.grad[0], j.hess[0, 0]) == (2.0, -1.0, 0.0)


def test_symmetry_of_derivative_tensors():
    j = jet_of("sin(x0*x1) * exp(x0 - x1^2)", (0.4, -0.7), 3)
    assert np.allclose(j.hess, j.hess.T)
    for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0)):
        assert np.allclose(j.third, np.transpose(j.third, perm))


def test_truncation_matches_direct_evaluation():
    full = jet_of("cos(x0) + x0*x1^3", (0.3, 0.9), 3)
    direct = jet_of("cos(x0) + x0*x1^3", (0.3, 0.9), 0)
    assert full.truncated(0).value == direct.value


# --- finite-difference oracle ------------------------------------------------
#
# Gradients are checked against central differences of order-0 values at step
# 1e-5. Higher tensors are checked against central differences of the
# next-lower jet: float64 roundoff (eps/h^2, eps/h^3) swamps direct differences
# of values at this step size.

STEP = 1e-5
REL = 1e-6


def _central(fn, point, i, step=STEP):
    up = list(point)
    dn = list(point)
    up[i] += step
    dn[i] -= step
    return (fn(tuple(up)) - fn(tuple(dn))) / (2 * step)


def _check_against_fd(ast, point, coords):
    n = len(point)
    jet = eval_jet(ast, point, coords, 3)
    scale = max(1.0, float(np.max(np.abs(jet.grad))), abs(jet.value))

    def value(p):
        return eval_jet(ast, p, coords, 0).value

    for i in range(n):
        fd = _central(value, point, i)
        assert abs(jet.grad[i] - fd) <= REL * max(scale, abs(fd)), (i, jet.grad[i], fd)

    def grad(p, i):
        return eval_jet(ast, p, coords, 1).grad[i]

    hscale = max(1.0, float(np.max(np.abs(jet.hess))))
    for i in range(n):
        for j in range(n):
            fd = _central(lambda p: grad(p, i), point, j)
            assert abs(jet.hess[i, j] - fd) <= REL * max(hscale, abs(fd))

    def hess(p, i, j):
        return eval_jet(ast, p, coords, 2).hess[i, j]

    tscale = max(1.0, float(np.max(np.abs(jet.third))))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                fd = _central(lambda p: hess(p, i, j), point, k)
                assert abs(jet.third[i, j, k] - fd) <= REL * max(tscale, abs(fd))


def test_random_polynomials_match_finite_differences():
    rng = np.random.default_rng(2024)
    for trial in range(12):
        dim = 1 + trial % 3
        coords = tuple(f"x{i}" for i in range(dim))
        ast = _poly_ast(rng, coords, degree=5, terms=4, cap=1.0)
        point = tuple(float(v) for v in rng.uniform(-1, 1, dim))
        _check_against_fd(ast, point, coords)


def test_transcendental_matches_finite_differences():
    coords = ("x0", "x1")
    ast = parse("exp(x0) * sin(x1) + tanh(x0*x1)", coords)
    _check_against_fd(ast, (0.3, -0.6), coords)


# --- exact calculus laws -------------------------------------------------------

finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(finite, finite, finite)
def test_product_rule_exact(a, b, x):
    coords = ("x0",)
    f = parse(f"({a!r}) * x0 + ({b!r})", coords)
    g = parse("x0^2 - 3*x0", coords)
    fg = parse(f"(({a!r}) * x0 + ({b!r})) * (x0^2 - 3*x0)", coords)
    jf = eval_jet(f, (x,), coords, 3)
    jg = eval_jet(g, (x,), coords, 3)
    jfg = eval_jet(fg, (x,), coords, 3)
    prod = jf * jg
    assert prod.value == pytest.approx(jfg.value, abs=1e-12, rel=1e-12)
    assert prod.grad[0] == pytest.approx(jfg.grad[0], abs=1e-11, rel=1e-12)
    assert prod.hess[0, 0] == pytest.approx(jfg.hess[0, 0], abs=1e-11, rel=1e-12)
    assert prod.third[0, 0, 0] == pytest.approx(jfg.third[0, 0, 0], abs=1e-10, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-1.2, max_value=1.2, allow_nan=False))
def test_chain_rule_exact(x):
    coords = ("x0",)
    inner = parse("x0^2 + 1", coords)
    outer_of_inner = parse("exp(x0^2 + 1)", coords)
    ji = eval_jet(inner, (x,), coords, 3)
    direct = eval_jet(outer_of_inner, (x,), coords, 3)
    e = math.exp(ji.value)
    chained = ji.apply(e, e, e, e)
    assert chained.value == pytest.approx(direct.value, rel=1e-12)
    assert chained.grad[0] == pytest.approx(direct.grad[0], rel=1e-12, abs=1e-12)
    assert chained.hess[0, 0] == pytest.approx(direct.hess[0, 0], rel=1e-12, abs=1e-11)
    assert chained.third[0, 0, 0] == pytest.approx(direct.third[0, 0, 0], rel=1e-12, abs=1e-10)


def test_jet_division_inverts_multiplication():
    coords = ("x0", "x1")
    a = eval_jet(parse("x0^3 - x1 + 2", coords), (0.5, -0.3), coords, 3)
    b = eval_jet(parse("cos(x0) + 3", coords), (0.5, -0.3), coords, 3)
    back = (a * b) / b
    assert back.value == pytest.approx(a.value, rel=1e-13)
    assert np.allclose(back.grad, a.grad, rtol=1e-12, atol=1e-13)
    assert np.allclose(back.hess, a.hess, rtol=1e-12, atol=1e-12)
    assert np.allclose(back.third, a.third, rtol=1e-11, atol=1e-11)
