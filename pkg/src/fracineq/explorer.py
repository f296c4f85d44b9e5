"""Batch studies: alpha scans, reduction sweeps, counterexample search."""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

from .battery import BatteryFunction
from .expr import Expr, ExprError, evaluate, evaluate_dual, parse, substitute
from .fracint import QuadratureError
from .invexity import DEFAULT_SEED, linear_eta
from .verify import (
    ALPHA_AT_MOST_ONE,
    ExponentPair,
    InequalityCase,
    VerificationResult,
    classical_derivative_bound,
    classical_hoelder_bound,
    classical_mean,
    verify,
)

T = TypeVar("T")
R = TypeVar("R")

RATIO_FLOOR = 1e-14
SCAN_COLUMNS = ("alpha", "lhs", "rhs", "margin", "ratio", "status")


def thread_count() -> int:
    """Worker cap from ``FRACINEQ_THREADS`` (default: CPU count)."""
    raw = os.environ.get("FRACINEQ_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"FRACINEQ_THREADS must be an integer, got {raw!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """``map`` that may run concurrently but always returns results in input order."""
    n = threads or thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


# --------------------------------------------------------------------------
# alpha scan


@dataclass(frozen=True)
class ScanPlan:
    case: InequalityCase
    alpha_grid: tuple[float, ...]

    def __post_init__(self) -> None:
        grid = tuple(float(a) for a in self.alpha_grid)
        object.__setattr__(self, "alpha_grid", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("alpha grid must be strictly increasing")
        for a in grid:
            if not a > 0:
                raise ValueError("alpha must be positive")
            tid = self.case.variant_of or self.case.theorem_id
            if tid in ALPHA_AT_MOST_ONE and a > 1:
                raise ValueError("alpha must lie in (0,1] for this theorem")


@dataclass(frozen=True)
class ScanRow:
    alpha: float
    lhs: float
    rhs: float
    margin: float
    ratio: Optional[float]
    status: str
    error: str = ""

    def as_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "ratio": "n/a" if self.ratio is None else self.ratio,
            "status": self.status,
            **({"error": self.error} if self.error else {}),
        }


def _row(case: InequalityCase, alpha: float) -> ScanRow:
    try:
        res = verify(case.with_alpha(alpha))
    except (ValueError, ArithmeticError, QuadratureError) as exc:
        nan = math.nan
        return ScanRow(alpha, nan, nan, nan, None, "failed", str(exc))
    ratio = res.lhs / res.rhs if res.rhs > RATIO_FLOOR else None
    return ScanRow(alpha, res.lhs, res.rhs, res.margin, ratio, res.status)


def alpha_scan(plan: ScanPlan, threads: int | None = None) -> list[ScanRow]:
    """One row per grid point; failed rows carry the error message."""
    return ordered_map(lambda a: _row(plan.case, a), list(plan.alpha_grid), threads)


def parse_alpha_grid(text: str) -> tuple[float, ...]:
    """``"0.25:3:0.25"`` (inclusive start:stop:step) or ``"0.5,1,2"``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range grid must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if not step > 0:
            raise ValueError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9))
        return tuple(round(start + k * step, 12) for k in range(n + 1))
    return tuple(float(p) for p in text.split(",") if p.strip())


# --------------------------------------------------------------------------
# reduction sweep


@dataclass(frozen=True)
class ReductionRow:
    function: str
    alpha: float
    check: str
    reference: float
    value: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.reference)


@dataclass
class ReductionReport:
    rows: list[ReductionRow] = field(default_factory=list)
    tolerance: float = 1e-12

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.rows), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance


_PAIRS = (("T2_1", "T1_2"), ("T2_2", "T1_3"), ("T2_5", "T1_5"), ("T2_4", "T1_4"))


def reduction_sweep(
    battery: Iterable[BatteryFunction],
    alpha_grid: Sequence[float],
    q_power: float = 2.0,
    p: float = 2.0,
    tolerance: float = 1e-12,
    threads: int | None = None,
) -> ReductionReport:
    """Compare invex theorems at ``eta = y - x`` with their classical forms, and
    the ``alpha = 1`` rows with the non-fractional bounds."""
    ex = ExponentPair.from_p(p)
    jobs = [(bf, float(al)) for bf in battery for al in alpha_grid]

    def run(job) -> list[ReductionRow]:
        bf, al = job
        f = bf.expr
        rows: list[ReductionRow] = []
        common = dict(f=f, a=bf.a, b=bf.b, alpha=al, check_hypotheses=False)
        eta = linear_eta()

        def case(tid, **kw):
            extra = {}
            if tid in ("T1_5", "T2_5"):
                extra["q_power"] = q_power
            if tid in ("T1_4", "T2_4"):
                extra["exponents"] = ex
            return InequalityCase(tid, **common, **extra, **kw)

        for inv, cls in _PAIRS:
            if inv in ALPHA_AT_MOST_ONE and al > 1:
                continue
            # only the mean bound avoids derivatives
            if inv != "T2_1" and not bf.smooth:
                continue
            r2 = verify(case(inv, eta=eta))
            r1 = verify(case(cls))
            label = f"{inv}->{cls}"
            rows.append(ReductionRow(bf.name, al, f"{label} lhs", r1.lhs, r2.lhs))
            rows.append(ReductionRow(bf.name, al, f"{label} rhs", r1.rhs, r2.rhs))
            rows.append(ReductionRow(bf.name, al, f"{label} margin", r1.stages[0].margin, r2.stages[0].margin))

        if bf.smooth:
            for base in ("T2_2", "T2_5", "T2_4"):
                if base in ALPHA_AT_MOST_ONE and al > 1:
                    continue
                extra = {"q_power": q_power} if base == "T2_5" else {"exponents": ex} if base == "T2_4" else {}
                rv = verify(InequalityCase("REMARK_C_VARIANTS", eta=eta, variant_of=base, **common, **extra))
                rb = verify(case(base, eta=eta))
                rows.append(ReductionRow(bf.name, al, f"remark({base}) rhs", rb.rhs, rv.rhs))

        if al == 1.0 and bf.smooth:
            eta_val = bf.b - bf.a
            dfa = evaluate_dual(f, bf.a).deriv
            dfb = evaluate_dual(f, bf.b).deriv
            r22 = verify(case("T2_2", eta=eta))
            r24 = verify(case("T2_4", eta=eta))
            rows.append(ReductionRow(bf.name, al, "T2_2 rhs vs alpha=1 bound", classical_derivative_bound(eta_val, dfa, dfb),
                                     r22.rhs))
            rows.append(ReductionRow(bf.name, al, "T2_4 rhs vs alpha=1 Hoelder bound",
                                     classical_hoelder_bound(eta_val, dfa, dfb, ex.p), r24.rhs))
            mean = classical_mean(f, bf.a, bf.a + eta_val)
            classical_lhs = abs(0.5 * (evaluate(f, bf.a) + evaluate(f, bf.a + eta_val)) - mean.value)
            rows.append(ReductionRow(bf.name, al, "alpha=1 defect vs classical mean", classical_lhs, r22.lhs))
        return rows

    report = ReductionReport(tolerance=tolerance)
    for chunk in ordered_map(run, jobs, threads):
        report.rows.extend(chunk)
    return report


# --------------------------------------------------------------------------
# counterexample search


@dataclass(frozen=True)
class Family:
    """Parametric expression family: ``template`` with named parameters in a box."""

    name: str
    template: str
    params: tuple[tuple[str, float, float], ...]

    def __post_init__(self) -> None:
        if not self.params:
            raise ValueError("family needs at least one parameter")
        for n, lo, hi in self.params:
            if not lo <= hi:
                raise ValueError(f"bad box for parameter {n}: [{lo}, {hi}]")
        parse(self.template, ("x",) + self.names)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _, _ in self.params)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for _, lo, _ in self.params])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, _, hi in self.params])

    def instantiate(self, values: Sequence[float]) -> Expr:
        e = parse(self.template, ("x",) + self.names)
        return substitute(e, dict(zip(self.names, (float(v) for v in values))))

    def describe(self) -> str:
        box = "; ".join(f"{n}={lo!r}:{hi!r}" for n, lo, hi in self.params)
        return f"{self.template}; {box}"


FAMILIES = {
    "quadratic": Family("quadratic", "c1*x + c2*x*(1-x)", (("c1", -1.0, 1.0), ("c2", 0.5, 2.0))),
    "quasiconvex-quadratic": Family(
        "quasiconvex-quadratic", "c1*x + c2*x*(1-x)", (("c1", -1.0, 1.0), ("c2", -2.0, 0.0))
    ),
    "cubic": Family(
        "cubic",
        "c0 + c1*x + c2*x^2 + c3*x^3",
        (("c0", -1.0, 1.0), ("c1", -1.0, 1.0), ("c2", -1.0, 1.0), ("c3", -1.0, 1.0)),
    ),
}

_BOX = re.compile(r"^\s*([A-Za-z_][A-Za-z_0-9]*)\s*=\s*([^:]+):(.+)$")


def parse_family(desc: str) -> Family:
    """A registry name, or ``"template; c1=lo:hi; c2=lo:hi"``."""
    desc = desc.strip()
    if desc in FAMILIES:
        return FAMILIES[desc]
    parts = [p for p in desc.split(";") if p.strip()]
    if len(parts) < 2:
        raise ValueError(f"unknown family {desc!r}; use a name from {sorted(FAMILIES)} or 'template; c=lo:hi'")
    params = []
    for p in parts[1:]:
        m = _BOX.match(p)
        if not m:
            raise ValueError(f"bad parameter box {p.strip()!r}; expected name=lo:hi")
        params.append((m.group(1), float(m.group(2)), float(m.group(3))))
    try:
        return Family("custom", parts[0].strip(), tuple(params))
    except ExprError as exc:
        raise ValueError(f"invalid family template: {exc}") from None


@dataclass(frozen=True)
class SearchBudget:
    max_evals: int
    seed: int = DEFAULT_SEED
    family: Family = FAMILIES["quadratic"]
    refine_steps: int = 50

    def __post_init__(self) -> None:
        if self.max_evals < 0:
            raise ValueError("max_evals must be non-negative")


@dataclass(frozen=True)
class Candidate:
    index: int
    params: tuple[float, ...]
    margin: float
    status: str


@dataclass
class SearchOutcome:
    theorem_id: str
    family: Family
    evaluations: int
    trajectory: list[Candidate]
    witness: Optional[Candidate] = None
    case: Optional[InequalityCase] = None
    result: Optional[VerificationResult] = None

    @property
    def found(self) -> bool:
        return self.witness is not None

    @property
    def best(self) -> Optional[Candidate]:
        scored = [c for c in self.trajectory if math.isfinite(c.margin)]
        return min(scored, key=lambda c: (c.margin, c.index), default=None)


_BATCH = 16


def counterexample_search(
    theorem_id: str,
    budget: SearchBudget,
    fixed: dict[str, Any] | None = None,
    threads: int | None = None,
) -> SearchOutcome:
    """Seeded uniform sampling of the family box, then coordinate descent on the
    best candidate; stops at the first parameter vector whose verdict is
    ``violated``. Hypotheses are skipped during the search and evaluated for
    the returned witness only."""
    fixed = dict(fixed or {})
    fam = budget.family
    template = InequalityCase(theorem_id, f=fam.instantiate(fam.lower), check_hypotheses=False, **fixed)
    outcome = SearchOutcome(theorem_id, fam, 0, [])
    if budget.max_evals == 0:
        return outcome

    def score(params: tuple[float, ...]) -> tuple[float, str]:
        try:
            res = verify(template.with_f(fam.instantiate(params)))
        except (ValueError, ArithmeticError, QuadratureError):
            return math.nan, "failed"
        return res.margin, res.status

    refine = min(budget.refine_steps, budget.max_evals // 2)
    n_uniform = budget.max_evals - refine
    rng = np.random.default_rng(budget.seed)
    draws = rng.uniform(fam.lower, fam.upper, size=(n_uniform, len(fam.params)))

    def record(params, margin, status) -> Optional[Candidate]:
        c = Candidate(len(outcome.trajectory), tuple(float(v) for v in params), margin, status)
        outcome.trajectory.append(c)
        outcome.evaluations += 1
        return c if status == "violated" else None

    for start in range(0, n_uniform, _BATCH):
        batch = [tuple(float(v) for v in row) for row in draws[start : start + _BATCH]]
        scores = ordered_map(score, batch, threads)
        for params, (margin, status) in zip(batch, scores):
            hit = record(params, margin, status)
            if hit:
                return _finish(outcome, hit, template)

    best = outcome.best
    if best is None:
        return outcome
    point = np.array(best.params)
    best_margin = best.margin
    step = 0.1 * (fam.upper - fam.lower)
    used = 0
    while used < refine:
        improved = False
        for j in range(len(point)):
            for sign in (1.0, -1.0):
                if used >= refine:
                    break
                trial = point.copy()
                trial[j] = min(fam.upper[j], max(fam.lower[j], trial[j] + sign * step[j]))
                if np.array_equal(trial, point):
                    continue
                margin, status = score(tuple(trial))
                used += 1
                hit = record(trial, margin, status)
                if hit:
                    return _finish(outcome, hit, template)
                if math.isfinite(margin) and margin < best_margin:
                    point, best_margin, improved = trial, margin, True
        if not improved:
            step = step * 0.5
            if not np.any(step > 1e-12 * (fam.upper - fam.lower + 1.0)):
                break
    return outcome


def _finish(outcome: SearchOutcome, hit: Candidate, template: InequalityCase) -> SearchOutcome:
    case = replace(template.with_f(outcome.family.instantiate(hit.params)), check_hypotheses=True)
    outcome.witness = hit
    outcome.case = case
    outcome.result = verify(case)
    return outcome
