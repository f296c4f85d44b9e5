"""Riemann-Liouville fractional integrals.

The left integral of order ``alpha`` is::

    J_{a+} f(x) = 1/Gamma(alpha) * int_a^x (x - t)^(alpha - 1) f(t) dt

With ``t = x - (x - a) v^(1/alpha)`` this becomes::

    (x - a)^alpha / Gamma(alpha + 1) * int_0^1 f(x - (x - a) v^(1/alpha)) dv

which has no kernel singularity for any ``alpha > 0``. The right integral
mirrors it. ``method="adaptive-bisection"`` instead integrates the raw kernel
in ``t`` and relies on bisection toward the singular endpoint; it is slower
and exists as an independent route for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .expr import Expr, as_expr, evaluate, evaluate_array, kink_points
from .quadrature import QuadratureConfig, QuadResult, integrate
from .special import gamma_fn


class QuadratureError(RuntimeError):
    """A quadrature did not reach its tolerance."""

    def __init__(self, message: str, result: QuadResult | None = None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class FracOrder:
    """Order ``alpha > 0``; ``alpha == 0`` only with ``degenerate=True`` (J^0 f = f)."""

    alpha: float
    degenerate: bool = False

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not math.isfinite(a):
            raise ValueError("alpha must be finite")
        if a == 0 and not self.degenerate:
            raise ValueError("alpha must be positive (use degenerate=True for J^0 f = f)")
        if a < 0:
            raise ValueError("alpha must be positive")
        object.__setattr__(self, "alpha", a)

    def __float__(self) -> float:
        return self.alpha


Order = Union[FracOrder, float]


def as_order(alpha: Order) -> FracOrder:
    return alpha if isinstance(alpha, FracOrder) else FracOrder(float(alpha))


def _one_sided(f: Expr, anchor: float, x: float, alpha: float, cfg: QuadratureConfig) -> QuadResult:
    """J f(x) where ``anchor`` is the fixed end (a for left, b for right)."""
    h = x - anchor  # signed: > 0 for left, < 0 for right
    width = abs(h)
    lo, hi = min(anchor, x), max(anchor, x)
    kinks = kink_points(f, lo, hi)
    scale = width**alpha / gamma_fn(alpha + 1.0)
    # tolerance is requested on the scaled result
    unit_cfg = cfg.scaled_abs(scale)

    if cfg.method == "desingularized-gauss":
        inv = 1.0 / alpha

        def integrand(v: np.ndarray) -> np.ndarray:
            return evaluate_array(f, x - h * np.power(v, inv))

        # kink at t maps to v = (|x - t| / width)^alpha
        breaks = [(abs(x - t) / width) ** alpha for t in kinks]
        res = integrate(integrand, 0.0, 1.0, unit_cfg, breaks)
        return res.scaled(scale)

    # raw kernel in s = |x - t| / width on [0, 1]; weight alpha * s^(alpha-1)
    def raw(s: np.ndarray) -> np.ndarray:
        return alpha * np.power(s, alpha - 1.0) * evaluate_array(f, x - h * s)

    breaks = [abs(x - t) / width for t in kinks]
    res = integrate(raw, 0.0, 1.0, unit_cfg, breaks)
    return res.scaled(scale)


def _degenerate(f: Expr, x: float) -> QuadResult:
    return QuadResult(evaluate(f, x), 0.0, 0, True)


def left_integral(
    f: Union[Expr, str], a: float, x: float, alpha: Order, cfg: QuadratureConfig | None = None
) -> QuadResult:
    """Left-sided integral ``J_{a+}^alpha f(x)`` for ``x > a``."""
    f = as_expr(f)
    order = as_order(alpha)
    a, x = float(a), float(x)
    if not x > a:
        raise ValueError(f"left integral needs x > a, got a={a!r}, x={x!r}")
    if order.alpha == 0:
        return _degenerate(f, x)
    return _one_sided(f, a, x, order.alpha, cfg or QuadratureConfig())


def right_integral(
    f: Union[Expr, str], x: float, b: float, alpha: Order, cfg: QuadratureConfig | None = None
) -> QuadResult:
    """Right-sided integral ``J_{b-}^alpha f(x)`` for ``b > x``."""
    f = as_expr(f)
    order = as_order(alpha)
    x, b = float(x), float(b)
    if not b > x:
        raise ValueError(f"right integral needs b > x, got x={x!r}, b={b!r}")
    if order.alpha == 0:
        return _degenerate(f, x)
    return _one_sided(f, b, x, order.alpha, cfg or QuadratureConfig())


def monomial_oracle(a: float, beta: float, alpha: Order, x: float) -> float:
    """Closed form of ``J_{a+}^alpha (t - a)^beta`` at ``x``."""
    alpha = as_order(alpha).alpha
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if not x > a:
        raise ValueError("monomial_oracle needs x > a")
    return gamma_fn(beta + 1.0) / gamma_fn(alpha + beta + 1.0) * (x - a) ** (alpha + beta)


def frac_trapezoid_mean(
    f: Union[Expr, str], a: float, eta_val: float, alpha: Order, cfg: QuadratureConfig | None = None
) -> QuadResult:
    """Symmetric fractional mean over ``[a, a + eta_val]``.

    ``Gamma(alpha+1) / (2 eta^alpha) * (J_{a+} f(a+eta) + J_{(a+eta)-} f(a))``.
    Returned as a :class:`QuadResult` so callers can see convergence; for a
    constant ``f`` the value is that constant.
    """
    f = as_expr(f)
    order = as_order(alpha)
    if not eta_val > 0:
        raise ValueError(f"eta value must be positive, got {eta_val!r}")
    cfg = cfg or QuadratureConfig()
    end = a + eta_val
    if order.alpha == 0:
        return QuadResult(0.5 * (evaluate(f, a) + evaluate(f, end)), 0.0, 0, True)
    factor = gamma_fn(order.alpha + 1.0) / (2.0 * eta_val**order.alpha)
    # each side gets half the absolute budget of the combined mean
    side_cfg = cfg.scaled_abs(2.0 * factor)
    left = left_integral(f, a, end, order, side_cfg)
    right = right_integral(f, a, end, order, side_cfg)
    return QuadResult(
        factor * (left.value + right.value),
        factor * (left.error_estimate + right.error_estimate),
        left.panels_used + right.panels_used,
        left.converged and right.converged,
    )
