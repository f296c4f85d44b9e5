"""Adaptive composite Gauss-Legendre quadrature."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

METHODS = ("desingularized-gauss", "adaptive-bisection")


@dataclass(frozen=True)
class QuadratureConfig:
    nodes_per_panel: int = 32
    max_panels: int = 4096
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    method: str = "desingularized-gauss"
    compensated: bool = True
    # optional hard ceiling on the absolute error, below max(abs_tol, rel_tol*|v|)
    error_cap: float = math.inf

    def __post_init__(self) -> None:
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be at least 2")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.rel_tol >= 0:
            raise ValueError("rel_tol must be non-negative")
        if not self.error_cap > 0:
            raise ValueError("error_cap must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")

    def target(self, value: float) -> float:
        return min(max(self.abs_tol, self.rel_tol * abs(value)), self.error_cap)

    def scaled_abs(self, factor: float) -> "QuadratureConfig":
        """Absolute tolerances divided by ``factor`` (for a result later multiplied by it)."""
        if not factor > 0:
            return self
        return replace(self, abs_tol=self.abs_tol / factor, error_cap=self.error_cap / factor)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    panels_used: int
    converged: bool

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(self.value * factor, self.error_estimate * abs(factor), self.panels_used, self.converged)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _fixed(func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, n: int) -> float:
    x, w = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return float(half * np.dot(w, func(mid + half * x)))


def _sum(values: Iterable[float], compensated: bool) -> float:
    return math.fsum(values) if compensated else float(sum(values))


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    cfg: QuadratureConfig | None = None,
    breakpoints: Sequence[float] = (),
) -> QuadResult:
    """Integrate a vectorised ``func`` over ``[lo, hi]``.

    Each panel keeps its two-half refinement as its value and
    ``|refined - single panel|`` as its error; the panel with the largest error
    is bisected until the summed error meets ``cfg`` or ``max_panels`` is hit.
    ``breakpoints`` inside ``(lo, hi)`` become initial panel edges.
    """
    cfg = cfg or QuadratureConfig()
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    n = cfg.nodes_per_panel
    edges = [lo] + sorted({float(b) for b in breakpoints if lo < b < hi}) + [hi]

    def panel(a: float, b: float, whole: float | None = None):
        if whole is None:
            whole = _fixed(func, a, b, n)
        m = 0.5 * (a + b)
        left = _fixed(func, a, m, n)
        right = _fixed(func, m, b, n)
        refined = left + right
        return refined, abs(refined - whole), (left, right)

    # heap entries: (-error, seq, a, b, value, halves); seq keeps ties deterministic
    heap = []
    seq = 0
    for a, b in zip(edges, edges[1:]):
        val, err, halves = panel(a, b)
        heap.append((-err, seq, a, b, val, halves))
        seq += 1
    heapq.heapify(heap)

    def totals():
        return (
            _sum((e[4] for e in heap), cfg.compensated),
            _sum((-e[0] for e in heap), cfg.compensated),
        )

    value, error = totals()
    while error > cfg.target(value) and len(heap) < cfg.max_panels:
        neg_err, _, a, b, _, (left, right) = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not (a < m < b):
            # interval below float resolution; cannot refine further
            heapq.heappush(heap, (neg_err, seq, a, b, left + right, (left, right)))
            seq += 1
            break
        for ca, cb, whole in ((a, m, left), (m, b, right)):
            val, err, halves = panel(ca, cb, whole)
            heapq.heappush(heap, (-err, seq, ca, cb, val, halves))
            seq += 1
        value, error = totals()
    return QuadResult(value, error, len(heap), error <= cfg.target(value))
