"""Command-line front end.

Commands: integrate, verify, certify, scan, search, report. Every command
accepts ``--config FILE`` (JSON); flags given on the command line override
the file. ``--out PATH`` writes a report (``-`` for stdout) in ``--format``
json or csv.

Exit codes:

* integrate: 0 converged, 2 error or no convergence
* verify: 0 holds, 1 violated, 3 inconclusive, 2 error
* certify: 0 certified on samples, 1 violated, 2 error
* scan: 0 all rows hold, 1 some row violated, 3 some row inconclusive or
  failed, 2 error
* search: 0 no witness, 1 witness found, 2 error
* report: 0 re-execution reproduced the stored result byte for byte,
  1 mismatch, 2 error
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from pydantic import BaseModel

from . import report as rep
from .config import (
    CertifyConfig,
    IntegrateConfig,
    ScanConfig,
    SearchConfig,
    VerifyConfig,
    load_config,
    merge,
    read_config_file,
)
from .expr import ExprError, parse
from .explorer import SCAN_COLUMNS, ScanPlan, SearchBudget, alpha_scan, counterexample_search, parse_alpha_grid, \
    parse_family
from .fracint import FracOrder, QuadratureError, left_integral, right_integral
from .invexity import (
    Interval,
    SamplingPlan,
    check_condition_c,
    check_eq_1_5,
    check_invex_set,
    certify_preinvex,
    certify_prequasiinvex,
    certify_quasiconvex,
    make_eta,
)
from .quadrature import QuadratureConfig
from .verify import (
    ALPHA_AT_MOST_ONE,
    HOLDS,
    INCONCLUSIVE,
    VIOLATED_STATUS,
    ExponentPair,
    InequalityCase,
    verify,
)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3

VERIFY_COLUMNS = SCAN_COLUMNS
INTEGRATE_COLUMNS = ("value", "error_estimate", "panels_used", "converged")
CERTIFY_COLUMNS = ("property", "subject", "status", "samples_used", "max_violation", "tolerance")


@dataclass
class Outcome:
    result: dict[str, Any]
    columns: Sequence[str]
    rows: list[dict[str, Any]]
    summary: list[str] = field(default_factory=list)
    code: int = EXIT_OK


# --------------------------------------------------------------------------
# config -> computation


def _integrate(cfg: IntegrateConfig) -> Outcome:
    order = FracOrder(cfg.alpha)
    qc = QuadratureConfig(nodes_per_panel=cfg.nodes, abs_tol=cfg.tol * 1e-2, rel_tol=cfg.tol, method=cfg.method)
    f = parse(cfg.f)
    if cfg.side == "left":
        res = left_integral(f, cfg.a, cfg.x, order, qc)
    else:
        res = right_integral(f, cfg.x, cfg.a, order, qc)
    result = {
        "value": res.value,
        "error_estimate": res.error_estimate,
        "panels_used": res.panels_used,
        "converged": res.converged,
    }
    summary = [
        f"value          {rep.shortest(res.value)}",
        f"error_estimate {rep.shortest(res.error_estimate)}",
        f"panels         {res.panels_used}",
    ]
    code = EXIT_OK
    if not res.converged:
        summary.append("error: quadrature did not converge")
        code = EXIT_ERROR
    return Outcome(result, INTEGRATE_COLUMNS, [result], summary, code)


def build_case(cfg: VerifyConfig | ScanConfig) -> InequalityCase:
    """An :class:`InequalityCase` from verify/scan flags."""
    tid = cfg.theorem.upper()
    base = (cfg.variant_of or tid).upper()
    exponents = None
    q_power = None
    if base in ALPHA_AT_MOST_ONE:
        # p and q are conjugate; p = q = 2 when neither is given
        if cfg.p is not None:
            exponents = ExponentPair.from_p(cfg.p)
        elif cfg.q is not None:
            exponents = ExponentPair.from_q(cfg.q)
        else:
            exponents = ExponentPair.from_p(2.0)
    elif base in ("T1_5", "T2_5"):
        q_power = cfg.q if cfg.q is not None else 1.0
    return InequalityCase(
        tid,
        f=parse(cfg.f),
        a=cfg.a,
        b=cfg.b,
        alpha=cfg.alpha,
        eta=make_eta(cfg.eta) if cfg.eta else None,
        domain=Interval(*cfg.domain) if cfg.domain else None,
        exponents=exponents,
        q_power=q_power,
        variant_of=cfg.variant_of.upper() if cfg.variant_of else None,
        plan=SamplingPlan(seed=cfg.seed),
        tol=cfg.tol,
        check_hypotheses=cfg.check_hypotheses,
    )


_STATUS_CODE = {HOLDS: EXIT_OK, VIOLATED_STATUS: EXIT_VIOLATED, INCONCLUSIVE: EXIT_INCONCLUSIVE}


def _verify(cfg: VerifyConfig) -> Outcome:
    case = build_case(cfg)
    res = verify(case)
    row = {"alpha": case.alpha, "lhs": res.lhs, "rhs": res.rhs, "margin": res.margin,
           "ratio": "n/a" if res.ratio is None else res.ratio, "status": res.status}
    summary = [
        f"{res.theorem_id}: {res.status}",
        f"lhs    {rep.shortest(res.lhs)}",
        f"rhs    {rep.shortest(res.rhs)}",
        f"margin {rep.shortest(res.margin)}",
    ]
    for st in res.stages if len(res.stages) > 1 else ():
        summary.append(f"stage {st.name}: lhs {rep.shortest(st.lhs)} rhs {rep.shortest(st.rhs)}")
    for h in res.hypothesis_report:
        line = f"hypothesis {h.property} [{h.subject}]: {h.status}"
        if h.witness is not None:
            pt = ", ".join(f"{k}={rep.shortest(v)}" for k, v in h.witness.point)
            line += f" (witness {pt})"
        summary.append(line)
    summary.extend(res.notes)
    return Outcome(res.to_dict(), VERIFY_COLUMNS, [row], summary, _STATUS_CODE[res.status])


def _scan(cfg: ScanConfig) -> Outcome:
    case = build_case(cfg)
    plan = ScanPlan(case, parse_alpha_grid(cfg.alpha_grid))
    rows = [r.as_dict() for r in alpha_scan(plan)]
    statuses = {r["status"] for r in rows}
    if VIOLATED_STATUS in statuses:
        code = EXIT_VIOLATED
    elif statuses - {HOLDS}:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    summary = [",".join(SCAN_COLUMNS)]
    for r in rows:
        summary.append(",".join(r[c] if isinstance(r[c], str) else rep.shortest(r[c]) for c in SCAN_COLUMNS))
    result = {"case": case.to_dict(), "alpha_grid": list(plan.alpha_grid), "columns": list(SCAN_COLUMNS),
              "rows": rows}
    return Outcome(result, SCAN_COLUMNS, rows, summary, code)


def _certify(cfg: CertifyConfig) -> Outcome:
    plan = SamplingPlan(grid_points=cfg.grid_points, random_samples=cfg.random_samples, seed=cfg.seed)
    kw = {} if cfg.tol is None else {"tolerance": cfg.tol}
    prop = cfg.property

    def need(name: str, value):
        if value is None:
            raise ValueError(f"--{name} is required for property {prop}")
        return value

    if cfg.domain is not None:
        domain = Interval(*cfg.domain)
    elif cfg.a is not None and cfg.b is not None:
        domain = Interval(cfg.a, cfg.b)
    else:
        domain = None

    if prop == "quasiconvex":
        f = parse(need("f", cfg.f))
        report = certify_quasiconvex(f, need("a", cfg.a), need("b", cfg.b), plan, **kw)
    elif prop in ("preinvex", "prequasiinvex"):
        f = parse(need("f", cfg.f))
        eta = make_eta(need("eta", cfg.eta), domain)
        fn = certify_preinvex if prop == "preinvex" else certify_prequasiinvex
        report = fn(f, eta, need("domain", eta.domain), plan, **kw)
    else:
        eta = make_eta(need("eta", cfg.eta), domain)
        # identities on eta alone default to the unit interval
        dom = eta.domain or Interval(0.0, 1.0)
        if prop == "invex-set":
            report = check_invex_set(dom, eta, plan, **kw)
        elif prop == "condition-c":
            report = check_condition_c(eta, dom, plan, **kw)
        else:
            report = check_eq_1_5(eta, dom, plan, **kw)
    result = report.to_dict()
    summary = [
        f"{report.property} [{report.subject}]: {report.status}",
        f"samples        {report.samples_used}",
        f"max residual   {rep.shortest(report.max_violation)}",
    ]
    if report.witness is not None:
        pt = ", ".join(f"{k}={rep.shortest(v)}" for k, v in report.witness.point)
        summary.append(f"witness        {pt}")
    code = EXIT_OK if report.certified else EXIT_VIOLATED
    return Outcome(result, CERTIFY_COLUMNS, [result], summary, code)


def _search(cfg: SearchConfig) -> Outcome:
    family = parse_family(cfg.family)
    budget = SearchBudget(cfg.budget, seed=cfg.seed, family=family, refine_steps=cfg.refine_steps)
    tid = cfg.theorem.upper()
    fixed: dict[str, Any] = {"a": cfg.a, "b": cfg.b, "alpha": cfg.alpha, "tol": cfg.tol,
                             "plan": SamplingPlan(seed=cfg.seed)}
    if cfg.eta:
        fixed["eta"] = make_eta(cfg.eta)
    if tid in ALPHA_AT_MOST_ONE:
        fixed["exponents"] = ExponentPair.from_q(cfg.q) if cfg.p is None and cfg.q is not None \
            else ExponentPair.from_p(cfg.p if cfg.p is not None else 2.0)
    elif tid in ("T1_5", "T2_5"):
        fixed["q_power"] = cfg.q if cfg.q is not None else 1.0
    out = counterexample_search(tid, budget, fixed)

    names = family.names
    traj = [{"index": c.index, **dict(zip(names, c.params)), "margin": c.margin, "status": c.status}
            for c in out.trajectory]
    result: dict[str, Any] = {
        "theorem_id": tid,
        "family": family.describe(),
        "evaluations": out.evaluations,
        "found": out.found,
        "trajectory": traj,
        "witness": None,
    }
    summary = [f"{tid} over {family.describe()}: {out.evaluations} evaluations"]
    if out.found:
        w = out.witness
        result["witness"] = {
            "index": w.index,
            "params": dict(zip(names, w.params)),
            "case": out.case.to_dict(),
            "result": out.result.to_dict(),
        }
        pt = ", ".join(f"{n}={rep.shortest(v)}" for n, v in zip(names, w.params))
        summary += [f"witness #{w.index}: {pt}",
                    f"  f = {out.case.to_dict()['f']}",
                    f"  lhs {rep.shortest(out.result.lhs)} rhs {rep.shortest(out.result.rhs)} "
                    f"margin {rep.shortest(out.result.margin)} ({out.result.status})"]
    else:
        best = out.best
        summary.append("no witness within budget")
        if best is not None:
            summary.append(f"smallest margin {rep.shortest(best.margin)} at #{best.index}")
    columns = ("index",) + names + ("margin", "status")
    return Outcome(result, columns, traj, summary, EXIT_VIOLATED if out.found else EXIT_OK)


_RUNNERS: dict[type, Callable[[Any], Outcome]] = {
    IntegrateConfig: _integrate,
    VerifyConfig: _verify,
    ScanConfig: _scan,
    CertifyConfig: _certify,
    SearchConfig: _search,
}


def run_config(cfg: BaseModel) -> Outcome:
    return _RUNNERS[type(cfg)](cfg)


def embedded_config(cfg: BaseModel) -> dict[str, Any]:
    # output location and format do not affect results; leaving them out
    # keeps reports from different paths byte-identical
    return cfg.model_dump(mode="json", exclude={"out", "format"})


def render(cfg: BaseModel, outcome: Outcome, fmt: str) -> str:
    if fmt == "csv":
        return rep.csv_text(outcome.columns, outcome.rows)
    return rep.dumps(rep.envelope(cfg.command, embedded_config(cfg), outcome.result))


def _emit(text: str, out: Optional[str]) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        rep.atomic_write(out, text)


# --------------------------------------------------------------------------
# argparse


def _seed(text: str) -> int:
    return int(text, 0)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="report path, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--seed", type=_seed, help="RNG seed (decimal or 0x hex)")


def _add_case(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theorem", help="HH_CLASSICAL, T1_2..T1_5, T2_1, T2_2, T2_4, T2_5, REMARK_C_VARIANTS, LEMMA_1_4")
    p.add_argument("--f", help="function of x")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--eta", help="eta map: linear, zero, scaled(k), shifted-linear(c) or an expression in y, x")
    p.add_argument("--domain", help="invex domain 'lo,hi' (open interval)")
    p.add_argument("--p", type=float, help="Hoelder exponent p")
    p.add_argument("--q", type=float, help="conjugate exponent q, or the power q for T1_5/T2_5")
    p.add_argument("--variant-of", dest="variant_of", help="base theorem for REMARK_C_VARIANTS")
    p.add_argument("--tol", type=float, help="verdict tolerance (default 1e-9)")
    p.add_argument("--no-hypotheses", dest="check_hypotheses", action="store_false",
                   help="skip hypothesis certification")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracineq",
        description="Fractional integrals and numerical checks of Hermite-Hadamard type inequalities.",
        argument_default=argparse.SUPPRESS,
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("integrate", help="Riemann-Liouville fractional integral", argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--f")
    p.add_argument("--a", type=float, help="fixed end point (a for left, b for right)")
    p.add_argument("--x", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--nodes", type=int, help="Gauss-Legendre nodes per panel")
    p.add_argument("--tol", type=float, help="relative tolerance")
    p.add_argument("--method", choices=("desingularized-gauss", "adaptive-bisection"))

    p = sub.add_parser("verify", help="verify one inequality", argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_case(p)
    p.add_argument("--alpha", type=float)

    p = sub.add_parser("scan", help="margins over an alpha grid", argument_default=argparse.SUPPRESS)
    _add_common(p)
    _add_case(p)
    p.add_argument("--alpha-grid", dest="alpha_grid", help="'start:stop:step' or 'a1,a2,...'")

    p = sub.add_parser("certify", help="sampled certification of a property", argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--property",
                   choices=("quasiconvex", "preinvex", "prequasiinvex", "condition-c", "eq-1-5", "invex-set"))
    p.add_argument("--f")
    p.add_argument("--eta")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--domain", help="'lo,hi'")
    p.add_argument("--tol", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--random-samples", dest="random_samples", type=int)

    p = sub.add_parser("search", help="seeded counterexample search", argument_default=argparse.SUPPRESS)
    _add_common(p)
    p.add_argument("--theorem")
    p.add_argument("--family", help="quadratic, quasiconvex-quadratic, cubic, or 'template; c1=lo:hi; ...'")
    p.add_argument("--budget", type=int, help="maximum evaluations")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--eta")
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--refine-steps", dest="refine_steps", type=int)

    p = sub.add_parser("report", help="re-execute a JSON report and compare", argument_default=argparse.SUPPRESS)
    p.add_argument("path", help="JSON report written by another command")
    p.add_argument("--out", help="write the re-executed report here, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"))
    return parser


def _cmd_report(ns: dict[str, Any]) -> int:
    stored = rep.load(ns["path"])
    cfg = load_config({**stored["config"], "command": stored["command"]})
    outcome = run_config(cfg)
    fresh = rep.dumps(rep.envelope(cfg.command, embedded_config(cfg), outcome.result))
    same = fresh == rep.dumps(stored)
    print(f"{stored['command']}: {'reproduced' if same else 'MISMATCH'}")
    if "out" in ns:
        _emit(render(cfg, outcome, ns.get("format", "json")), ns["out"])
    return EXIT_OK if same else EXIT_VIOLATED


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    cmd = ns.pop("cmd")
    try:
        if cmd == "report":
            return _cmd_report(ns)
        path = ns.pop("config", None)
        file_data = read_config_file(path) if path else None
        cfg = merge(cmd, file_data, ns)
        outcome = run_config(cfg)
        if cfg.out is not None:
            _emit(render(cfg, outcome, cfg.format), cfg.out)
        if cfg.out != "-":
            print("\n".join(outcome.summary))
        return outcome.code
    except (ValueError, ArithmeticError, ExprError, QuadratureError, OSError, KeyError) as exc:
        print(f"error: {_message(exc)}", file=sys.stderr)
        return EXIT_ERROR


def _message(exc: Exception) -> str:
    errors = getattr(exc, "errors", None)
    if callable(errors):  # pydantic ValidationError
        parts = []
        for e in errors():
            loc = ".".join(str(x) for x in e["loc"][1:]) or "config"
            parts.append(f"{loc}: {e['msg']}")
        return "invalid config: " + "; ".join(parts)
    return str(exc)


if __name__ == "__main__":
    raise SystemExit(main())
