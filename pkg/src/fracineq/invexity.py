"""Eta maps, Condition C, and sampled certification of convexity-type properties.

Every check reduces to a sampled inequality ``lhs <= rhs + tolerance`` over a
box of variables. Certification is on samples only: a tensor grid plus seeded
uniform points. The worst sample is then sharpened by coordinate-wise
golden-section ascent before being reported as a witness.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .expr import Const, Expr, ExprError, evaluate_array, evaluate_dual_array, parse

DEFAULT_SEED = 0x48482012  # "HH" 2012
CERTIFIED = "certified-on-samples"
VIOLATED = "violated"

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Interval:
    """Interval ``(lo, hi)``; open unless ``closed`` is set."""

    lo: float
    hi: float
    closed: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval bounds must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def sample_bounds(self) -> tuple[float, float]:
        if self.closed:
            return self.lo, self.hi
        inset = 1e-9 * self.width
        return self.lo + inset, self.hi - inset

    def excess(self, z):
        """Signed distance outside the interval (<= 0 inside)."""
        return np.maximum(self.lo - z, z - self.hi)


@dataclass(frozen=True)
class EtaMap:
    """Bivariate map ``eta(y, x)`` given as an expression in ``y`` and ``x``."""

    expr: Expr
    domain: Optional[Interval] = None
    label: str = ""

    def __call__(self, first, second):
        """``eta(first, second)``: ``first`` binds ``y``, ``second`` binds ``x``."""
        first = np.asarray(first, dtype=float)
        second = np.asarray(second, dtype=float)
        return evaluate_array(self.expr, second, y=first)

    def at(self, first: float, second: float) -> float:
        return float(self(np.array([first]), np.array([second]))[0])

    @property
    def is_linear(self) -> bool:
        return self.label == "linear"

    def with_domain(self, domain: Interval) -> "EtaMap":
        return EtaMap(self.expr, domain, self.label)


_SCALED = re.compile(r"^(scaled|shifted-linear)\(\s*([-+0-9.eE]+)\s*\)$")


def linear_eta(domain: Interval | None = None) -> EtaMap:
    return EtaMap(parse("y - x", ("y", "x")), domain, "linear")


def make_eta(text: str, domain: Interval | None = None) -> EtaMap:
    """Build an eta map from a registry name or an expression in ``y`` and ``x``.

    Registry: ``linear`` (y - x), ``zero``, ``scaled(k)`` (k (y - x)) and
    ``shifted-linear(c)`` (y - x + c, defaulting to the domain (0, 1) where it
    is not invex for c != 0).
    """
    name = text.strip()
    if name == "linear":
        return linear_eta(domain)
    if name == "zero":
        return EtaMap(Const(0.0), domain, "zero")
    m = _SCALED.match(name)
    if m:
        k = float(m.group(2))
        if m.group(1) == "scaled":
            return EtaMap(parse(f"{k!r} * (y - x)", ("y", "x")), domain, f"scaled({k!r})")
        return EtaMap(
            parse(f"y - x + {k!r}", ("y", "x")), domain or Interval(0.0, 1.0), f"shifted-linear({k!r})"
        )
    expr = parse(name, ("y", "x"))
    label = "linear" if expr == parse("y - x", ("y", "x")) else name
    return EtaMap(expr, domain, label)


@dataclass(frozen=True)
class SamplingPlan:
    grid_points: int = 33
    random_samples: int = 10_000
    seed: int = DEFAULT_SEED
    refine_steps: int = 20

    def __post_init__(self) -> None:
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        if self.random_samples < 0 or self.refine_steps < 0:
            raise ValueError("sample counts must be non-negative")


@dataclass(frozen=True)
class Witness:
    point: tuple[tuple[str, float], ...]
    lhs: float
    rhs: float
    detail: tuple[tuple[str, float], ...] = ()

    def as_dict(self) -> dict[str, float]:
        return dict(self.point)

    @property
    def violation(self) -> float:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class CertReport:
    property: str
    status: str
    witness: Optional[Witness]
    samples_used: int
    max_violation: float
    tolerance: float
    subject: str = ""
    notes: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_dict(self) -> dict:
        d = {
            "property": self.property,
            "subject": self.subject,
            "status": self.status,
            "samples_used": self.samples_used,
            "max_violation": self.max_violation,
            "tolerance": self.tolerance,
            "witness": None,
            "notes": list(self.notes),
        }
        if self.witness is not None:
            d["witness"] = {
                "point": dict(self.witness.point),
                "lhs": self.witness.lhs,
                "rhs": self.witness.rhs,
                **({"detail": dict(self.witness.detail)} if self.witness.detail else {}),
            }
        return d


# --------------------------------------------------------------------------
# sampling engine

SideFn = Callable[[Mapping[str, np.ndarray]], tuple[np.ndarray, np.ndarray]]


def _samples(bounds: Sequence[tuple[float, float]], plan: SamplingPlan) -> list[np.ndarray]:
    axes = [np.linspace(lo, hi, plan.grid_points) for lo, hi in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    if plan.random_samples:
        rng = np.random.default_rng(plan.seed)
        u = rng.random((plan.random_samples, len(bounds)))
        for j, (lo, hi) in enumerate(bounds):
            cols[j] = np.concatenate([cols[j], lo + (hi - lo) * u[:, j]])
    return cols


def _golden_max(g: Callable[[float], float], lo: float, hi: float, iters: int = 16) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    return (c, gc) if gc >= gd else (d, gd)


def _refine(
    sides: SideFn,
    names: Sequence[str],
    bounds: Sequence[tuple[float, float]],
    start: np.ndarray,
    plan: SamplingPlan,
) -> np.ndarray:
    def gap(p: np.ndarray) -> float:
        try:
            lhs, rhs = sides({n: np.array([v]) for n, v in zip(names, p)})
            v = float(lhs[0] - rhs[0])
        except (ExprError, FloatingPointError, ValueError):
            return -math.inf
        return v if math.isfinite(v) else -math.inf

    best = start.astype(float).copy()
    best_val = gap(best)
    radius = np.array([(hi - lo) / (plan.grid_points - 1) for lo, hi in bounds])
    for _ in range(plan.refine_steps):
        for j, (lo, hi) in enumerate(bounds):
            a = max(lo, best[j] - radius[j])
            b = min(hi, best[j] + radius[j])
            if not a < b:
                continue

            def along(v: float, j=j) -> float:
                p = best.copy()
                p[j] = v
                return gap(p)

            cand, val = _golden_max(along, a, b)
            for v, gv in ((cand, val), (a, along(a)), (b, along(b))):
                if gv > best_val:
                    best[j], best_val = v, gv
        radius *= 0.5
    return best


def certify(
    prop: str,
    names: Sequence[str],
    bounds: Sequence[tuple[float, float]],
    sides: SideFn,
    plan: SamplingPlan,
    tolerance: float,
    subject: str = "",
    notes: Sequence[str] = (),
    detail: Callable[[Mapping[str, float]], Mapping[str, float]] | None = None,
) -> CertReport:
    """Sample ``lhs - rhs`` over the box and certify or return a witness."""
    cols = _samples(bounds, plan)
    lhs, rhs = sides(dict(zip(names, cols)))
    gap = np.asarray(lhs - rhs, dtype=float)
    if np.any(np.isnan(gap)):
        raise ExprError(f"{prop}: evaluation produced NaN")
    used = gap.size
    i = int(np.argmax(gap))
    worst = float(gap[i])
    if worst <= tolerance:
        return CertReport(prop, CERTIFIED, None, used, worst, tolerance, subject, tuple(notes))
    start = np.array([c[i] for c in cols])
    point = _refine(sides, names, bounds, start, plan) if plan.refine_steps else start
    wl, wr = sides({n: np.array([v]) for n, v in zip(names, point)})
    wl, wr = float(wl[0]), float(wr[0])
    if not wl - wr >= worst:
        point, wl, wr = start, float(lhs[i]), float(rhs[i])
    pt = {n: float(v) for n, v in zip(names, point)}
    extra = tuple(sorted(detail(pt).items())) if detail else ()
    witness = Witness(tuple(pt.items()), wl, wr, extra)
    return CertReport(
        prop, VIOLATED, witness, used + 1, max(worst, wl - wr), tolerance, subject, tuple(notes)
    )


# --------------------------------------------------------------------------
# function wrappers

Scalar = Union[Expr, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class AbsDerivativePower:
    """``x -> |f'(x)|^q`` with ``f'`` from forward-mode evaluation."""

    f: Expr
    q: float = 1.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        d = np.abs(evaluate_dual_array(self.f, x).deriv)
        return d if self.q == 1.0 else d**self.q

    def __str__(self) -> str:
        return f"|d/dx {self.f}|" + ("" if self.q == 1.0 else f"^{self.q!r}")


def _fn(f: Scalar) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(f, Expr):
        return lambda x: evaluate_array(f, x)
    return f


# --------------------------------------------------------------------------
# public checks


def check_invex_set(
    domain: Interval, eta: EtaMap, plan: SamplingPlan = SamplingPlan(), tolerance: float = 0.0
) -> CertReport:
    """``x + t eta(y, x)`` stays in ``domain`` for sampled x, y in domain, t in [0, 1]."""
    xb = domain.sample_bounds()

    def sides(v):
        z = v["x"] + v["t"] * eta(v["y"], v["x"])
        return domain.excess(z), np.zeros_like(z)

    def detail(p):
        return {"z": p["x"] + p["t"] * eta.at(p["y"], p["x"])}

    return certify(
        "invex-set", ("x", "y", "t"), (xb, xb, (0.0, 1.0)), sides, plan, tolerance,
        subject=f"A=({domain.lo!r}, {domain.hi!r}), eta={eta.label or eta.expr}", detail=detail,
    )


def _condition_c_impl(eta: EtaMap, domain: Interval, plan: SamplingPlan, tolerance: float) -> CertReport:
    xb = domain.sample_bounds()

    def sides(v):
        x, y, t = v["x"], v["y"], v["t"]
        d = eta(x, y)
        z = y + t * d
        r1 = np.abs(eta(y, z) + t * d)
        r2 = np.abs(eta(x, z) - (1.0 - t) * d)
        return np.maximum(r1, r2), np.zeros_like(r1)

    def detail(p):
        x, y, t = p["x"], p["y"], p["t"]
        d = eta.at(x, y)
        z = y + t * d
        return {
            "eta(y,y+t*eta(x,y))": eta.at(y, z),
            "-t*eta(x,y)": -t * d,
            "eta(x,y+t*eta(x,y))": eta.at(x, z),
            "(1-t)*eta(x,y)": (1.0 - t) * d,
        }

    return certify(
        "condition-c", ("x", "y", "t"), (xb, xb, (0.0, 1.0)), sides, plan, tolerance,
        subject=f"eta={eta.label or eta.expr} on ({domain.lo!r}, {domain.hi!r})", detail=detail,
    )


_condition_c_cached = lru_cache(maxsize=256)(_condition_c_impl)


def check_condition_c(
    eta: EtaMap, domain: Interval | None = None, plan: SamplingPlan = SamplingPlan(), tolerance: float = 1e-10
) -> CertReport:
    """Maximum absolute residual of both Condition C identities over samples."""
    domain = domain or eta.domain
    if domain is None:
        raise ValueError("a domain is required for Condition C")
    return _condition_c_cached(eta, domain, plan, tolerance)


def check_eq_1_5(
    eta: EtaMap, domain: Interval | None = None, plan: SamplingPlan = SamplingPlan(), tolerance: float = 1e-10
) -> CertReport:
    """Residual of ``eta(y + t2 eta(x,y), y + t1 eta(x,y)) = (t2 - t1) eta(x,y)``.

    The tensor grid contains the diagonal ``t1 == t2``, where the identity
    demands ``eta(z, z) == 0``.
    """
    domain = domain or eta.domain
    if domain is None:
        raise ValueError("a domain is required")
    xb = domain.sample_bounds()

    def sides(v):
        x, y, t1, t2 = v["x"], v["y"], v["t1"], v["t2"]
        d = eta(x, y)
        r = np.abs(eta(y + t2 * d, y + t1 * d) - (t2 - t1) * d)
        return r, np.zeros_like(r)

    def detail(p):
        d = eta.at(p["x"], p["y"])
        return {
            "eta(y+t2*eta(x,y),y+t1*eta(x,y))": eta.at(p["y"] + p["t2"] * d, p["y"] + p["t1"] * d),
            "(t2-t1)*eta(x,y)": (p["t2"] - p["t1"]) * d,
        }

    diag = np.linspace(xb[0], xb[1], plan.grid_points)
    diag_res = np.abs(eta(diag, diag))
    notes = [f"max |eta(z,z)| on diagonal = {float(diag_res.max())!r}"]
    return certify(
        "eq-1-5", ("x", "y", "t1", "t2"), (xb, xb, (0.0, 1.0), (0.0, 1.0)), sides, plan, tolerance,
        subject=f"eta={eta.label or eta.expr} on ({domain.lo!r}, {domain.hi!r})", notes=notes, detail=detail,
    )


def _label(f: Scalar) -> str:
    return str(f)


def _quasiconvex_impl(f: Scalar, a: float, b: float, plan: SamplingPlan, tolerance: float) -> CertReport:
    fn = _fn(f)

    def sides(v):
        x, y, t = v["x"], v["y"], v["t"]
        return fn(t * x + (1.0 - t) * y), np.maximum(fn(x), fn(y))

    return certify(
        "quasiconvex", ("x", "y", "t"), ((a, b), (a, b), (0.0, 1.0)), sides, plan, tolerance,
        subject=f"{_label(f)} on [{a!r}, {b!r}]",
    )


def _pre_impl(
    kind: str, f: Scalar, eta: EtaMap, domain: Interval, plan: SamplingPlan, tolerance: float
) -> CertReport:
    fn = _fn(f)
    xb = domain.sample_bounds()

    def sides(v):
        x, y, t = v["x"], v["y"], v["t"]
        lhs = fn(x + t * eta(y, x))
        fx, fy = fn(x), fn(y)
        rhs = (1.0 - t) * fx + t * fy if kind == "preinvex" else np.maximum(fx, fy)
        return lhs, rhs

    return certify(
        kind, ("x", "y", "t"), (xb, xb, (0.0, 1.0)), sides, plan, tolerance,
        subject=f"{_label(f)} on ({domain.lo!r}, {domain.hi!r}), eta={eta.label or eta.expr}",
    )


_quasiconvex_cached = lru_cache(maxsize=1024)(_quasiconvex_impl)
_pre_cached = lru_cache(maxsize=1024)(_pre_impl)


def _hashable(f: Scalar) -> bool:
    try:
        hash(f)
    except TypeError:
        return False
    return isinstance(f, (Expr, AbsDerivativePower))


def certify_quasiconvex(
    f: Scalar, a: float, b: float, plan: SamplingPlan = SamplingPlan(), tolerance: float = 1e-9
) -> CertReport:
    """``f(t x + (1-t) y) <= max(f(x), f(y))`` on ``[a, b]``."""
    if not a < b:
        raise ValueError("certify_quasiconvex needs a < b")
    impl = _quasiconvex_cached if _hashable(f) else _quasiconvex_impl
    return impl(f, float(a), float(b), plan, tolerance)


def certify_preinvex(
    f: Scalar, eta: EtaMap, domain: Interval | None = None, plan: SamplingPlan = SamplingPlan(), tolerance: float = 1e-9
) -> CertReport:
    """``f(x + t eta(y,x)) <= (1-t) f(x) + t f(y)`` on the domain."""
    domain = domain or eta.domain
    impl = _pre_cached if _hashable(f) else _pre_impl
    return impl("preinvex", f, eta, domain, plan, tolerance)


def certify_prequasiinvex(
    f: Scalar, eta: EtaMap, domain: Interval | None = None, plan: SamplingPlan = SamplingPlan(), tolerance: float = 1e-9
) -> CertReport:
    """``f(x + t eta(y,x)) <= max(f(x), f(y))`` on the domain."""
    domain = domain or eta.domain
    impl = _pre_cached if _hashable(f) else _pre_impl
    return impl("prequasiinvex", f, eta, domain, plan, tolerance)
