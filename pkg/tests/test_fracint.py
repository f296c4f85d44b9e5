import itertools
import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy.special import gamma as sp_gamma

from fracineq.battery import BATTERY
from fracineq.expr import compose_affine, evaluate, evaluate_array, parse
from fracineq.fracint import (
    FracOrder,
    frac_trapezoid_mean,
    left_integral,
    monomial_oracle,
    right_integral,
)
from fracineq.quadrature import QuadratureConfig
from fracineq.verify import classical_mean

METHODS = ("desingularized-gauss", "adaptive-bisection")


def test_order_validation():
    assert FracOrder(0.5).alpha == 0.5
    with pytest.raises(ValueError, match="alpha must be positive"):
        FracOrder(-1)
    with pytest.raises(ValueError, match="alpha must be positive"):
        FracOrder(0)
    assert FracOrder(0, degenerate=True).alpha == 0.0


def test_degenerate_order_is_identity():
    assert left_integral("x^2", 0, 3, FracOrder(0, degenerate=True)).value == 9.0


def _close(value, oracle):
    return abs(value - oracle) <= max(1e-10, 1e-9 * abs(oracle))


def test_reference_examples():
    assert left_integral("1", 0, 1, 0.5).value == pytest.approx(1.1283791670955126, abs=1e-10)
    assert left_integral("x^2", 0, 1, 0.5).value == pytest.approx(0.60180222245094004, abs=1e-10)
    assert left_integral("x", 0, 1, 1).value == pytest.approx(0.5, abs=1e-12)
    assert right_integral("1", 0, 1, 0.5).value == pytest.approx(1.1283791670955126, abs=1e-10)
    assert right_integral("x", 0, 1, 1).value == pytest.approx(0.5, abs=1e-12)


def test_reference_examples_raw_kernel_route():
    # the cross-check route is held to the oracle tolerance
    cfg = QuadratureConfig(method="adaptive-bisection")
    assert _close(left_integral("1", 0, 1, 0.5, cfg).value, 1.1283791670955126)
    assert _close(left_integral("x^2", 0, 1, 0.5, cfg).value, 0.60180222245094004)
    assert _close(right_integral("1", 0, 1, 0.5, cfg).value, 1.1283791670955126)
    assert left_integral("x", 0, 1, 1, cfg).value == pytest.approx(0.5, abs=1e-12)


def test_bad_endpoints():
    with pytest.raises(ValueError):
        left_integral("x", 1, 1, 0.5)
    with pytest.raises(ValueError):
        right_integral("x", 2, 1, 0.5)


def test_monomial_oracle_examples():
    assert monomial_oracle(0, 0, 1, 1) == 1.0
    assert monomial_oracle(0, 1, 1, 1) == 0.5
    assert monomial_oracle(0, 2, 0.5, 1) == pytest.approx(0.60180222245094004, rel=1e-14)


GRID = list(itertools.product((0.25, 0.5, 1.0, 1.5, 2.5), (0, 1, 2, 3), (0.0, -1.0, 2.0), (0.5, 1.0, 3.0)))


@pytest.mark.parametrize("method", METHODS)
def test_oracle_grid(method):
    cfg = QuadratureConfig(method=method)
    for alpha, beta, a, width in GRID:
        f = parse(f"(x - ({a!r}))^{beta}") if beta else parse("1")
        x = a + width
        res = left_integral(f, a, x, alpha, cfg)
        oracle = monomial_oracle(a, beta, alpha, x)
        assert res.converged
        assert abs(res.value - oracle) <= max(1e-10, 1e-9 * abs(oracle)), (alpha, beta, a, width)


@pytest.mark.parametrize("text", ["exp(x)", "exp(-x^2)", "1/(1 + x^2)", "abs(x - 0.4)", "sqrt(1 + x)"])
@pytest.mark.parametrize("alpha", [0.3, 0.75, 1.0, 2.2])
def test_left_and_right_against_scipy_algebraic_weight(text, alpha):
    f = parse(text)
    a, b = -0.5, 1.25
    g = lambda t: evaluate(f, t)  # noqa: E731
    left_ref = sp_integrate.quad(g, a, b, weight="alg", wvar=(0.0, alpha - 1.0), epsabs=1e-14, epsrel=1e-13)[0]
    right_ref = sp_integrate.quad(g, a, b, weight="alg", wvar=(alpha - 1.0, 0.0), epsabs=1e-14, epsrel=1e-13)[0]
    left_ref /= sp_gamma(alpha)
    right_ref /= sp_gamma(alpha)
    assert left_integral(f, a, b, alpha).value == pytest.approx(left_ref, abs=1e-10)
    assert right_integral(f, a, b, alpha).value == pytest.approx(right_ref, abs=1e-10)


def test_frozen_exp_values():
    # 40-digit mpmath quadrature of the defining integrals
    assert _close(left_integral("exp(x)", 0, 1, 0.75).value, 2.0114742704129717)
    tight = QuadratureConfig(error_cap=1e-13)
    assert left_integral("exp(x)", 0, 1, 0.75, tight).value == pytest.approx(2.0114742704129717, abs=1e-12)
    assert right_integral("exp(x)", 0, 1, 0.75, tight).value == pytest.approx(1.7475526813924685, abs=1e-12)
    assert right_integral("x^2", 0, 2, 1.5, tight).value == pytest.approx(3.6474722779559559, abs=1e-12)


def test_reflection_identity():
    a, b, alpha = 0.0, 1.0, 0.75
    f = parse("exp(x)")
    reflected = compose_affine(f, -1.0, a + b)
    for x in (0.1, 0.5, 0.9):
        assert right_integral(f, x, b, alpha).value == pytest.approx(
            left_integral(reflected, a + b - b, a + b - x, alpha).value, abs=1e-10
        )
    assert right_integral(f, a, b, alpha).value == pytest.approx(left_integral(reflected, a, b, alpha).value,
                                                                 abs=1e-10)


def test_linearity_on_random_polynomials():
    rng = np.random.default_rng(11)
    for _ in range(20):
        c1, c2 = (float(c) for c in rng.uniform(-3, 3, 2))
        p1 = " + ".join(f"({float(c)!r})*x^{k}" for k, c in enumerate(rng.uniform(-2, 2, 4)))
        p2 = " + ".join(f"({float(c)!r})*x^{k}" for k, c in enumerate(rng.uniform(-2, 2, 3)))
        alpha = float(rng.uniform(0.1, 3.0))
        a, x = -0.7, float(rng.uniform(0.0, 2.0))
        combo = parse(f"({c1!r})*({p1}) + ({c2!r})*({p2})")
        cfg = QuadratureConfig(error_cap=1e-12)
        lhs = left_integral(combo, a, x, alpha, cfg).value
        rhs = c1 * left_integral(p1, a, x, alpha, cfg).value + c2 * left_integral(p2, a, x, alpha, cfg).value
        assert abs(lhs - rhs) <= 1e-10


def test_monotone_in_integrand():
    pairs = [("exp(x)", "1 + x"), ("x^2 + 1", "2*x"), ("abs(x)", "x"), ("max(x, 0.2)", "min(x, 0.2)")]
    for ftext, gtext in pairs:
        xs = np.linspace(-1, 2, 301)
        assert np.all(evaluate_array(parse(ftext), xs) >= evaluate_array(parse(gtext), xs))
        for alpha in (0.2, 1.0, 2.5):
            assert left_integral(ftext, -1, 2, alpha).value >= left_integral(gtext, -1, 2, alpha).value - 1e-12


def test_trapezoid_mean_examples():
    for alpha in (0.1, 0.5, 1.0, 3.0):
        for eta in (0.25, 1.0, 4.0):
            assert frac_trapezoid_mean("2.5", -1.0, eta, alpha).value == pytest.approx(2.5, abs=1e-12)
    assert frac_trapezoid_mean("x^2", 0, 1, 1).value == pytest.approx(1 / 3, abs=1e-10)
    assert frac_trapezoid_mean("x*(1-x)", 0, 1, 1).value == pytest.approx(1 / 6, abs=1e-10)
    with pytest.raises(ValueError):
        frac_trapezoid_mean("x", 0, 0, 1)


@pytest.mark.parametrize("bf", BATTERY, ids=lambda b: b.name)
def test_alpha_one_equals_classical_mean(bf):
    eta = bf.b - bf.a
    mean = frac_trapezoid_mean(bf.expr, bf.a, eta, 1.0).value
    assert abs(mean - classical_mean(bf.expr, bf.a, bf.b).value) <= 1e-10


def test_trapezoid_mean_honours_absolute_target():
    cfg = QuadratureConfig(error_cap=1e-11)
    res = frac_trapezoid_mean("exp(x)", 0, 1, 1.5, cfg)
    assert res.converged and res.error_estimate <= 1e-11
