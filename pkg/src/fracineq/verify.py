"""Both sides of the Hermite-Hadamard type inequalities, with hypothesis checks.

Every verifier returns a :class:`VerificationResult`. An inequality holds when
``rhs - lhs >= -tol``; when any quadrature feeding it failed to converge or
reports an error estimate of ``tol / 10`` or more, the verdict is
``inconclusive`` instead.

The fractional mean over ``[a, a + eta]`` is::

    Gamma(alpha+1) / (2 eta^alpha) * (J_{a+} f(a+eta) + J_{(a+eta)-} f(a))

and the trapezoid defect is ``(f(a) + f(a+eta)) / 2`` minus that mean.
Classical theorems (``T1_*``) run through the same code path as their
invex counterparts with ``eta = b - a``, so the reductions compare identical
quadrature inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence, Union

import numpy as np

from .expr import (
    Expr,
    as_expr,
    evaluate,
    evaluate_array,
    evaluate_dual,
    evaluate_dual_array,
    kink_points,
    to_text,
)
from .fracint import QuadratureError, as_order, frac_trapezoid_mean
from .invexity import (
    CERTIFIED,
    VIOLATED,
    AbsDerivativePower,
    CertReport,
    EtaMap,
    Interval,
    SamplingPlan,
    Witness,
    certify_preinvex,
    certify_prequasiinvex,
    certify_quasiconvex,
    check_condition_c,
    check_invex_set,
    linear_eta,
    make_eta,
)
from .quadrature import QuadratureConfig, QuadResult, integrate

THEOREMS = (
    "HH_CLASSICAL",
    "T1_2",
    "T1_3",
    "T1_4",
    "T1_5",
    "T2_1",
    "T2_2",
    "T2_4",
    "T2_5",
    "LEMMA_1_4",
    "REMARK_C_VARIANTS",
)
ALPHA_AT_MOST_ONE = ("T1_4", "T2_4")
USES_ETA = ("T2_1", "T2_2", "T2_4", "T2_5", "REMARK_C_VARIANTS", "LEMMA_1_4")
REMARK_BASES = ("T2_2", "T2_5", "T2_4")

HOLDS = "holds"
VIOLATED_STATUS = "violated"
INCONCLUSIVE = "inconclusive"

DEFAULT_TOL = 1e-9


class NotDifferentiableError(ValueError):
    """``f`` has a kink where a derivative is required."""


class HypothesisRangeError(ValueError):
    """A theorem's parameter range excludes the requested inputs."""


@dataclass(frozen=True)
class ExponentPair:
    p: float
    q: float

    def __post_init__(self) -> None:
        if not (self.p > 1 and self.q > 1):
            raise ValueError("Hoelder exponents must satisfy p > 1 and q > 1")
        if abs(1.0 / self.p + 1.0 / self.q - 1.0) > 1e-12:
            raise ValueError(f"1/p + 1/q must equal 1 (p={self.p!r}, q={self.q!r})")

    @classmethod
    def from_p(cls, p: float) -> "ExponentPair":
        p = float(p)
        if not p > 1:
            raise ValueError("Hoelder exponents must satisfy p > 1 and q > 1")
        return cls(p, p / (p - 1.0))

    @classmethod
    def from_q(cls, q: float) -> "ExponentPair":
        pair = cls.from_p(q)
        return cls(pair.q, pair.p)


@dataclass(frozen=True)
class Stage:
    name: str
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass
class VerificationResult:
    theorem_id: str
    inputs: dict[str, Any]
    lhs: float
    rhs: float
    margin: float
    status: str
    hypothesis_report: list[CertReport] = field(default_factory=list)
    quad_diagnostics: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    stages: list[Stage] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def hypotheses_certified(self) -> bool:
        return all(r.certified for r in self.hypothesis_report)

    @property
    def ratio(self) -> Optional[float]:
        return self.lhs / self.rhs if self.rhs > 1e-14 else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "theorem_id": self.theorem_id,
            "inputs": dict(self.inputs),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "status": self.status,
            "stages": [
                {"name": s.name, "lhs": s.lhs, "rhs": s.rhs, "margin": s.margin} for s in self.stages
            ],
            "hypotheses": [r.to_dict() for r in self.hypothesis_report],
            "quad_diagnostics": dict(self.quad_diagnostics),
            "notes": list(self.notes),
        }


# --------------------------------------------------------------------------
# closed-form kernels


def kernel_abs_integral(alpha: float) -> float:
    """``int_0^1 |t^alpha - (1-t)^alpha| dt = 2/(alpha+1) (1 - 2^-alpha)``."""
    alpha = float(alpha)
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return 2.0 / (alpha + 1.0) * (1.0 - 2.0**-alpha)


def kernel_pow_integral(alpha: float, p: float) -> float:
    """``int_0^1 |1 - 2t|^(alpha p) dt = 1 / (alpha p + 1)``."""
    s = float(alpha) * float(p)
    if not s > -1:
        raise ValueError("alpha * p must exceed -1")
    return 1.0 / (s + 1.0)


def _abs_factor(alpha: float) -> float:
    # (1/(alpha+1)) (1 - 2^-alpha)
    return kernel_abs_integral(alpha) / 2.0


# --------------------------------------------------------------------------
# building blocks


def _deriv(f: Expr, x: float) -> float:
    d = evaluate_dual(f, x)
    if d.kink:
        raise NotDifferentiableError(f"f is not differentiable at x = {x!r} (kink)")
    return d.deriv


def trapezoid_defect_result(
    f: Union[Expr, str], a: float, eta_val: float, alpha, cfg: QuadratureConfig | None = None
) -> tuple[float, QuadResult]:
    f = as_expr(f)
    mean = frac_trapezoid_mean(f, a, eta_val, alpha, cfg)
    avg = 0.5 * (evaluate(f, a) + evaluate(f, a + eta_val))
    return avg - mean.value, mean


def trapezoid_defect(
    f: Union[Expr, str], a: float, eta_val: float, alpha, cfg: QuadratureConfig | None = None
) -> float:
    """``(f(a) + f(a+eta))/2`` minus the fractional mean over ``[a, a+eta]``."""
    d, mean = trapezoid_defect_result(f, a, eta_val, alpha, cfg)
    if not mean.converged:
        raise QuadratureError("fractional mean did not converge", mean)
    return d


def lemma_kernel_side(
    f: Union[Expr, str], a: float, eta_val: float, alpha, cfg: QuadratureConfig | None = None
) -> tuple[float, QuadResult]:
    """``eta/2 * int_0^1 (t^alpha - (1-t)^alpha) f'(a + t eta) dt``, split at t = 1/2."""
    f = as_expr(f)
    alpha = as_order(alpha).alpha
    if not eta_val > 0:
        raise ValueError("eta value must be positive")
    kinks = kink_points(f, a, a + eta_val)
    if kinks:
        raise NotDifferentiableError(f"f has a kink at x = {kinks[0]!r} inside [a, a+eta]")
    for x in (a, a + eta_val):
        _deriv(f, x)

    def integrand(t: np.ndarray) -> np.ndarray:
        d = evaluate_dual_array(f, a + t * eta_val)
        if d.kink:
            raise NotDifferentiableError("f' evaluated at a kink")
        return (np.power(t, alpha) - np.power(1.0 - t, alpha)) * d.deriv

    res = integrate(integrand, 0.0, 1.0, cfg or QuadratureConfig(), (0.5,))
    return 0.5 * eta_val * res.value, res.scaled(0.5 * eta_val)


def lemma_identity_residual(
    f: Union[Expr, str], a: float, eta_val: float, alpha, cfg: QuadratureConfig | None = None
) -> float:
    """Absolute gap between the two sides of the trapezoid identity."""
    f = as_expr(f)
    rhs, kres = lemma_kernel_side(f, a, eta_val, alpha, cfg)
    lhs, mres = trapezoid_defect_result(f, a, eta_val, alpha, cfg)
    if not (kres.converged and mres.converged):
        raise QuadratureError("lemma quadrature did not converge")
    return abs(lhs - rhs)


def classical_mean(f: Union[Expr, str], a: float, b: float, cfg: QuadratureConfig | None = None) -> QuadResult:
    """``1/(b-a) int_a^b f`` by adaptive Gauss-Legendre (no fractional kernel)."""
    f = as_expr(f)
    res = integrate(lambda t: evaluate_array(f, t), a, b, cfg or QuadratureConfig(), kink_points(f, a, b))
    return res.scaled(1.0 / (b - a))


def classical_derivative_bound(eta_val: float, df_a: float, df_b: float) -> float:
    """Right side of the alpha = 1 bound ``|eta|/4 max(|f'(a)|, |f'(b)|)``."""
    return abs(eta_val) / 4.0 * max(abs(df_a), abs(df_b))


def classical_hoelder_bound(eta_val: float, df_a: float, df_b: float, p: float) -> float:
    """Right side of the alpha = 1 Hoelder bound with exponent ``p/(p-1)``."""
    r = p / (p - 1.0)
    return abs(eta_val) / (2.0 * (p + 1.0) ** (1.0 / p)) * max(abs(df_a) ** r, abs(df_b) ** r) ** ((p - 1.0) / p)


# --------------------------------------------------------------------------
# hypothesis helpers


def _differentiability(f: Expr, lo: float, hi: float) -> CertReport:
    kinks = kink_points(f, lo, hi)
    subject = f"{to_text(f)} on [{lo!r}, {hi!r}]"
    if kinks:
        w = Witness((("x", kinks[0]),), 1.0, 0.0)
        return CertReport("differentiable", VIOLATED, w, len(kinks), 1.0, 0.0, subject, ("kink detected",))
    return CertReport("differentiable", CERTIFIED, None, 257, 0.0, 0.0, subject)


def _positivity_notes(f: Expr, lo: float, hi: float, require_nonneg_a: bool, label: str) -> list[str]:
    notes = []
    xs = np.linspace(lo, hi, 257)
    try:
        m = float(np.min(evaluate_array(f, xs)))
    except Exception:  # noqa: BLE001 - warning only
        m = math.nan
    if not m > 0:
        notes.append(f"warning: {label} assumes a positive f; min f on samples = {m!r}")
    if require_nonneg_a and lo < 0:
        notes.append(f"warning: {label} states 0 <= a < b; a = {lo!r}")
    return notes


def _default_domain(a: float, b: float, end: float) -> Interval:
    return Interval(min(a, b, end), max(a, b, end))


# --------------------------------------------------------------------------
# result assembly


def _verdict(stages: Sequence[Stage], quads: dict[str, QuadResult], tol: float) -> tuple[float, str]:
    margin = min(s.margin for s in stages)
    quad_ok = all(q.converged and q.error_estimate < tol / 10.0 for q in quads.values())
    if not quad_ok:
        return margin, INCONCLUSIVE
    return margin, HOLDS if margin >= -tol else VIOLATED_STATUS


def _quad_diag(quads: dict[str, QuadResult]) -> dict[str, Any]:
    return {
        k: {"error_estimate": q.error_estimate, "panels": q.panels_used, "converged": q.converged}
        for k, q in quads.items()
    }


def _result(
    theorem_id: str,
    inputs: dict,
    lhs: float,
    rhs: float,
    stages: Sequence[Stage],
    quads: dict[str, QuadResult],
    hyps: Sequence[CertReport],
    notes: Sequence[str],
    tol: float,
) -> VerificationResult:
    margin, status = _verdict(stages, quads, tol)
    return VerificationResult(
        theorem_id, inputs, lhs, rhs, margin, status, list(hyps), _quad_diag(quads), list(notes), list(stages)
    )


def _inputs(theorem_id: str, f: Expr, a: float, b: float, alpha=None, **extra) -> dict[str, Any]:
    d: dict[str, Any] = {"theorem_id": theorem_id, "f": to_text(f), "a": a, "b": b}
    if alpha is not None:
        d["alpha"] = alpha
    for k, v in extra.items():
        if v is not None:
            d[k] = v
    return d


def _check_alpha(theorem_id: str, alpha: float) -> float:
    alpha = as_order(alpha).alpha
    if theorem_id in ALPHA_AT_MOST_ONE and not (0 < alpha <= 1):
        raise HypothesisRangeError("alpha must lie in (0,1] for this theorem")
    return alpha


def _check_q(q: float | None) -> float:
    q = 1.0 if q is None else float(q)
    if not q >= 1:
        raise HypothesisRangeError("q must be at least 1")
    return q


# --------------------------------------------------------------------------
# verifiers


def verify_hh_classical(
    f: Union[Expr, str],
    a: float,
    b: float,
    cfg: QuadratureConfig | None = None,
    *,
    tol: float = DEFAULT_TOL,
    plan: SamplingPlan = SamplingPlan(),
    check_hypotheses: bool = True,
) -> VerificationResult:
    """``f((a+b)/2) <= mean <= (f(a)+f(b))/2`` for convex ``f``."""
    f = as_expr(f)
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("need a < b")
    mean = classical_mean(f, a, b, _verdict_cfg(cfg, tol))
    mid = evaluate(f, 0.5 * (a + b))
    avg = 0.5 * (evaluate(f, a) + evaluate(f, b))
    stages = [Stage("midpoint <= mean", mid, mean.value), Stage("mean <= endpoint average", mean.value, avg)]
    hyps = []
    if check_hypotheses:
        hyps.append(certify_preinvex(f, linear_eta(), Interval(a, b, closed=True), plan))
    return _result(
        "HH_CLASSICAL", _inputs("HH_CLASSICAL", f, a, b, tol=tol), mid, avg, stages, {"mean": mean}, hyps, [], tol
    )


def _verdict_cfg(cfg: QuadratureConfig | None, tol: float) -> QuadratureConfig:
    # a verdict needs quadrature error below tol/10; ask for tol/100
    cfg = cfg or QuadratureConfig()
    return replace(cfg, error_cap=min(cfg.error_cap, tol / 100.0))


def _frac_core(f: Expr, a: float, eta_val: float, alpha: float, cfg):
    defect, mean = trapezoid_defect_result(f, a, eta_val, alpha, cfg)
    return abs(defect), mean


def _mean_bound(
    theorem_id: str,
    f: Expr,
    a: float,
    b: float,
    alpha: float,
    eta: EtaMap,
    domain: Interval | None,
    cfg,
    tol: float,
    plan: SamplingPlan,
    check_hypotheses: bool,
) -> VerificationResult:
    eta_val = float(b - a) if theorem_id == "T1_2" else eta.at(b, a)
    if not eta_val > 0:
        raise ValueError(f"need a < a + eta(b, a); eta(b, a) = {eta_val!r}")
    end = a + eta_val
    mean = frac_trapezoid_mean(f, a, eta_val, alpha, _verdict_cfg(cfg, tol))
    fa, fb, fend = evaluate(f, a), evaluate(f, b), evaluate(f, end)
    hyps: list[CertReport] = []
    notes: list[str] = []
    if theorem_id == "T1_2":
        stages = [Stage("mean <= max(f(a), f(b))", mean.value, max(fa, fb))]
        notes += _positivity_notes(f, a, b, True, "the classical quasi-convex bound")
        if check_hypotheses:
            hyps.append(certify_quasiconvex(f, a, b, plan))
        inputs = _inputs(theorem_id, f, a, b, alpha, tol=tol)
    else:
        stages = [
            Stage("mean <= max(f(a), f(a+eta(b,a)))", mean.value, max(fa, fend)),
            Stage("max(f(a), f(a+eta(b,a))) <= max(f(a), f(b))", max(fa, fend), max(fa, fb)),
        ]
        notes += _positivity_notes(f, a, end, False, "the prequasiinvex mean bound")
        A = domain or eta.domain or _default_domain(a, b, end)
        if check_hypotheses:
            hyps += [
                check_invex_set(A, eta, plan),
                check_condition_c(eta, A, plan),
                certify_prequasiinvex(f, eta, A, plan),
            ]
        inputs = _inputs(theorem_id, f, a, b, alpha, eta=eta.label or to_text(eta.expr),
                         domain=[A.lo, A.hi], tol=tol)
    return _result(theorem_id, inputs, mean.value, max(fa, fb), stages, {"frac_mean": mean}, hyps, notes, tol)


def verify_thm_1_2(f, a, b, alpha, cfg=None, *, tol=DEFAULT_TOL, plan=SamplingPlan(), check_hypotheses=True):
    """Fractional mean of a quasi-convex ``f`` is at most ``max(f(a), f(b))``."""
    f = as_expr(f)
    alpha = _check_alpha("T1_2", alpha)
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("need a < b")
    return _mean_bound("T1_2", f, a, b, alpha, linear_eta(), None, cfg, tol, plan, check_hypotheses)


def verify_thm_2_1(f, eta, a, b, alpha, cfg=None, *, domain=None, tol=DEFAULT_TOL, plan=SamplingPlan(),
                   check_hypotheses=True):
    """Two-stage bound for prequasiinvex ``f`` under Condition C."""
    f = as_expr(f)
    eta = make_eta(eta) if isinstance(eta, str) else eta
    alpha = _check_alpha("T2_1", alpha)
    return _mean_bound("T2_1", f, float(a), float(b), alpha, eta, domain, cfg, tol, plan, check_hypotheses)


def _derivative_bound(
    theorem_id: str,
    f: Expr,
    a: float,
    b: float,
    alpha: float,
    *,
    eta: EtaMap | None,
    domain: Interval | None,
    q: float,
    exponents: ExponentPair | None,
    at_end: bool,
    cfg,
    tol: float,
    plan: SamplingPlan,
    check_hypotheses: bool,
    extra_hyps: Sequence[CertReport] = (),
    extra_notes: Sequence[str] = (),
    variant_of: str | None = None,
) -> VerificationResult:
    classical = eta is None
    eta_val = float(b - a) if classical else eta.at(b, a)
    if not eta_val > 0:
        raise ValueError(f"need a < a + eta(b, a); eta(b, a) = {eta_val!r}")
    end = a + eta_val
    df_a = _deriv(f, a)
    df_other = _deriv(f, end if at_end else b)
    lhs, mean = _frac_core(f, a, eta_val, alpha, _verdict_cfg(cfg, tol))

    if exponents is not None:
        rhs = eta_val / (2.0 * (alpha * exponents.p + 1.0) ** (1.0 / exponents.p)) * max(
            abs(df_a) ** exponents.q, abs(df_other) ** exponents.q
        ) ** (1.0 / exponents.q)
        power = exponents.q
    else:
        rhs = eta_val * _abs_factor(alpha) * max(abs(df_a) ** q, abs(df_other) ** q) ** (1.0 / q)
        power = q

    other = "f'(a+eta(b,a))" if at_end else "f'(b)"
    stages = [Stage(f"|defect| <= bound with {other}", lhs, rhs)]
    hyps: list[CertReport] = list(extra_hyps)
    notes = list(extra_notes)
    if check_hypotheses:
        hyps.append(_differentiability(f, a, end))
        g = AbsDerivativePower(f, power)
        if classical:
            hyps.append(certify_quasiconvex(g, a, b, plan))
        else:
            A = domain or eta.domain or _default_domain(a, b, end)
            hyps.append(check_invex_set(A, eta, plan))
            hyps.append(certify_prequasiinvex(g, eta, A, plan))
    extra = {
        "q": q if exponents is None else exponents.q,
        "p": exponents.p if exponents is not None else None,
        "variant_of": variant_of,
        "tol": tol,
    }
    if not classical:
        A = domain or eta.domain or _default_domain(a, b, end)
        extra["eta"] = eta.label or to_text(eta.expr)
        extra["domain"] = [A.lo, A.hi]
    inputs = _inputs(theorem_id, f, a, b, alpha, **extra)
    return _result(theorem_id, inputs, lhs, rhs, stages, {"frac_mean": mean}, hyps, notes, tol)


def verify_thm_1_3(f, a, b, alpha, cfg=None, *, tol=DEFAULT_TOL, plan=SamplingPlan(), check_hypotheses=True):
    """``|defect| <= (b-a)/(alpha+1) (1 - 2^-alpha) max(|f'(a)|, |f'(b)|)``."""
    f = as_expr(f)
    alpha = _check_alpha("T1_3", alpha)
    return _derivative_bound("T1_3", f, float(a), float(b), alpha, eta=None, domain=None, q=1.0, exponents=None,
                             at_end=False, cfg=cfg, tol=tol, plan=plan, check_hypotheses=check_hypotheses)


def verify_thm_1_4(f, a, b, alpha, exponents: ExponentPair, cfg=None, *, tol=DEFAULT_TOL, plan=SamplingPlan(),
                   check_hypotheses=True):
    """Hoelder-type bound with ``(alpha p + 1)^(1/p)``; needs ``0 < alpha <= 1``."""
    f = as_expr(f)
    alpha = _check_alpha("T1_4", alpha)
    if exponents is None:
        raise ValueError("T1_4 needs conjugate exponents p, q")
    return _derivative_bound("T1_4", f, float(a), float(b), alpha, eta=None, domain=None, q=exponents.q,
                             exponents=exponents, at_end=False, cfg=cfg, tol=tol, plan=plan,
                             check_hypotheses=check_hypotheses)


def verify_thm_1_5(f, a, b, alpha, q_power=1.0, cfg=None, *, tol=DEFAULT_TOL, plan=SamplingPlan(),
                   check_hypotheses=True):
    """Power-mean bound for ``|f'|^q`` quasi-convex, ``q >= 1``."""
    f = as_expr(f)
    alpha = _check_alpha("T1_5", alpha)
    q = _check_q(q_power)
    return _derivative_bound("T1_5", f, float(a), float(b), alpha, eta=None, domain=None, q=q, exponents=None,
                             at_end=False, cfg=cfg, tol=tol, plan=plan, check_hypotheses=check_hypotheses)


def _eta(eta) -> EtaMap:
    return make_eta(eta) if isinstance(eta, str) else eta


def verify_thm_2_2(f, eta, a, b, alpha, cfg=None, *, domain=None, tol=DEFAULT_TOL, plan=SamplingPlan(),
                   check_hypotheses=True):
    """Prequasiinvex ``|f'|`` bound with ``eta(b,a)`` in place of ``b - a``."""
    f = as_expr(f)
    alpha = _check_alpha("T2_2", alpha)
    return _derivative_bound("T2_2", f, float(a), float(b), alpha, eta=_eta(eta), domain=domain, q=1.0,
                             exponents=None, at_end=False, cfg=cfg, tol=tol, plan=plan,
                             check_hypotheses=check_hypotheses)


def verify_thm_2_5(f, eta, a, b, alpha, q_power=1.0, cfg=None, *, domain=None, tol=DEFAULT_TOL,
                   plan=SamplingPlan(), check_hypotheses=True):
    """Power-mean bound for prequasiinvex ``|f'|^q``; ``q = 1`` is accepted with a note."""
    f = as_expr(f)
    alpha = _check_alpha("T2_5", alpha)
    q = _check_q(q_power)
    notes = ["note: q = 1 lies outside the stated q > 1 of this theorem"] if q == 1.0 else []
    return _derivative_bound("T2_5", f, float(a), float(b), alpha, eta=_eta(eta), domain=domain, q=q,
                             exponents=None, at_end=False, cfg=cfg, tol=tol, plan=plan,
                             check_hypotheses=check_hypotheses, extra_notes=notes)


def verify_thm_2_4(f, eta, a, b, alpha, exponents: ExponentPair, cfg=None, *, domain=None, tol=DEFAULT_TOL,
                   plan=SamplingPlan(), check_hypotheses=True):
    """Hoelder-type bound using ``f'(a + eta(b,a))``; needs ``0 < alpha <= 1``."""
    f = as_expr(f)
    alpha = _check_alpha("T2_4", alpha)
    if exponents is None:
        raise ValueError("T2_4 needs conjugate exponents p, q")
    return _derivative_bound("T2_4", f, float(a), float(b), alpha, eta=_eta(eta), domain=domain, q=exponents.q,
                             exponents=exponents, at_end=True, cfg=cfg, tol=tol, plan=plan,
                             check_hypotheses=check_hypotheses)


def verify_remark_variants(f, eta, a, b, alpha, base: str = "T2_2", *, q_power=None, exponents=None, cfg=None,
                           domain=None, tol=DEFAULT_TOL, plan=SamplingPlan(), check_hypotheses=True):
    """Condition C variants: ``|f'(b)|`` replaced by ``|f'(a + eta(b,a))|``."""
    if base not in REMARK_BASES:
        raise ValueError(f"base must be one of {REMARK_BASES}")
    f = as_expr(f)
    eta = _eta(eta)
    alpha = _check_alpha(base, alpha)
    a, b = float(a), float(b)
    eta_val = eta.at(b, a)
    if not eta_val > 0:
        raise ValueError(f"need a < a + eta(b, a); eta(b, a) = {eta_val!r}")
    A = domain or eta.domain or _default_domain(a, b, a + eta_val)
    hyps = [check_condition_c(eta, A, plan)] if check_hypotheses else []
    if base == "T2_4":
        if exponents is None:
            raise ValueError("the T2_4 variant needs conjugate exponents p, q")
        q, ex = exponents.q, exponents
    else:
        q = 1.0 if base == "T2_2" else _check_q(q_power)
        ex = None
    return _derivative_bound("REMARK_C_VARIANTS", f, a, b, alpha, eta=eta, domain=A, q=q, exponents=ex,
                             at_end=True, cfg=cfg, tol=tol, plan=plan, check_hypotheses=check_hypotheses,
                             extra_hyps=hyps, variant_of=base)


def verify_lemma(f, eta, a, b, alpha, cfg=None, *, tol=1e-8) -> VerificationResult:
    """Both sides of the trapezoid identity; ``holds`` when they agree within ``tol``."""
    f = as_expr(f)
    eta = _eta(eta)
    alpha = _check_alpha("LEMMA_1_4", alpha)
    a, b = float(a), float(b)
    eta_val = eta.at(b, a)
    if not eta_val > 0:
        raise ValueError(f"need a < a + eta(b, a); eta(b, a) = {eta_val!r}")
    cfg = _verdict_cfg(cfg, tol)
    lhs, mean = trapezoid_defect_result(f, a, eta_val, alpha, cfg)
    rhs, kres = lemma_kernel_side(f, a, eta_val, alpha, cfg)
    gap = abs(lhs - rhs)
    stages = [Stage("|defect - kernel integral| <= 0", gap, 0.0)]
    quads = {"frac_mean": mean, "kernel_integral": kres}
    inputs = _inputs("LEMMA_1_4", f, a, b, alpha, eta=eta.label or to_text(eta.expr), tol=tol)
    return _result("LEMMA_1_4", inputs, lhs, rhs, stages, quads, [], [f"residual = {gap!r}"], tol)


# --------------------------------------------------------------------------
# case objects


@dataclass(frozen=True)
class InequalityCase:
    theorem_id: str
    f: Expr
    a: float
    b: float
    alpha: float = 1.0
    eta: Optional[EtaMap] = None
    domain: Optional[Interval] = None
    exponents: Optional[ExponentPair] = None
    q_power: Optional[float] = None
    variant_of: Optional[str] = None
    quad_cfg: QuadratureConfig = QuadratureConfig()
    plan: SamplingPlan = SamplingPlan()
    tol: float = DEFAULT_TOL
    check_hypotheses: bool = True

    def __post_init__(self) -> None:
        if self.theorem_id not in THEOREMS:
            raise ValueError(f"unknown theorem {self.theorem_id!r}; choose from {', '.join(THEOREMS)}")
        if isinstance(self.f, str):
            object.__setattr__(self, "f", as_expr(self.f))
        if isinstance(self.eta, str):
            object.__setattr__(self, "eta", make_eta(self.eta))
        if self.theorem_id != "HH_CLASSICAL":
            object.__setattr__(self, "alpha", _check_alpha(self.variant_of or self.theorem_id, self.alpha))

    def with_alpha(self, alpha: float) -> "InequalityCase":
        return replace(self, alpha=alpha)

    def with_f(self, f: Expr) -> "InequalityCase":
        return replace(self, f=f)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "theorem_id": self.theorem_id,
            "f": to_text(self.f),
            "a": self.a,
            "b": self.b,
            "alpha": self.alpha,
            "tol": self.tol,
        }
        if self.eta is not None:
            d["eta"] = self.eta.label or to_text(self.eta.expr)
        if self.domain is not None:
            d["domain"] = [self.domain.lo, self.domain.hi]
        if self.exponents is not None:
            d["p"], d["q"] = self.exponents.p, self.exponents.q
        if self.q_power is not None:
            d["q_power"] = self.q_power
        if self.variant_of is not None:
            d["variant_of"] = self.variant_of
        return d


def verify(case: InequalityCase) -> VerificationResult:
    """Dispatch a case to its verifier."""
    tid = case.theorem_id
    kw = dict(tol=case.tol, plan=case.plan, check_hypotheses=case.check_hypotheses)
    eta = case.eta or linear_eta()
    cfg = case.quad_cfg
    if tid == "HH_CLASSICAL":
        return verify_hh_classical(case.f, case.a, case.b, cfg, **kw)
    if tid == "T1_2":
        return verify_thm_1_2(case.f, case.a, case.b, case.alpha, cfg, **kw)
    if tid == "T1_3":
        return verify_thm_1_3(case.f, case.a, case.b, case.alpha, cfg, **kw)
    if tid == "T1_4":
        return verify_thm_1_4(case.f, case.a, case.b, case.alpha, case.exponents, cfg, **kw)
    if tid == "T1_5":
        return verify_thm_1_5(case.f, case.a, case.b, case.alpha, case.q_power, cfg, **kw)
    if tid == "T2_1":
        return verify_thm_2_1(case.f, eta, case.a, case.b, case.alpha, cfg, domain=case.domain, **kw)
    if tid == "T2_2":
        return verify_thm_2_2(case.f, eta, case.a, case.b, case.alpha, cfg, domain=case.domain, **kw)
    if tid == "T2_5":
        return verify_thm_2_5(case.f, eta, case.a, case.b, case.alpha, case.q_power, cfg, domain=case.domain, **kw)
    if tid == "T2_4":
        return verify_thm_2_4(case.f, eta, case.a, case.b, case.alpha, case.exponents, cfg, domain=case.domain,
                              **kw)
    if tid == "REMARK_C_VARIANTS":
        return verify_remark_variants(case.f, eta, case.a, case.b, case.alpha, case.variant_of or "T2_2",
                                      q_power=case.q_power, exponents=case.exponents, cfg=cfg,
                                      domain=case.domain, **kw)
    return verify_lemma(case.f, eta, case.a, case.b, case.alpha, cfg, tol=case.tol)
