import math

import pytest

from fracineq.battery import BATTERY, get, smooth_battery
from fracineq.explorer import (
    FAMILIES,
    ScanPlan,
    SearchBudget,
    alpha_scan,
    counterexample_search,
    ordered_map,
    parse_alpha_grid,
    parse_family,
    reduction_sweep,
    thread_count,
)
from fracineq.invexity import DEFAULT_SEED, linear_eta
from fracineq.verify import ExponentPair, InequalityCase, verify


def _case(tid="T2_2", f="x^2", **kw):
    return InequalityCase(tid, f=f, a=0, b=1, eta=linear_eta(), **kw)


def test_scan_single_alpha():
    rows = alpha_scan(ScanPlan(_case(), (1.0,)))
    assert len(rows) == 1
    assert rows[0].margin == pytest.approx(1 / 3)


def test_scan_linear_function():
    rows = alpha_scan(ScanPlan(_case(f="2*x + 1"), (0.25, 1.0, 2.0)))
    for r in rows:
        assert r.lhs == pytest.approx(0.0, abs=1e-11)
        assert r.margin == pytest.approx(r.rhs, abs=1e-11)
        assert r.ratio == pytest.approx(0.0, abs=1e-10)


def test_scan_rhs_factor_closed_form():
    rows = alpha_scan(ScanPlan(_case(), (0.5, 1.0, 2.0)))
    # rhs = (1 - 2^-alpha)/(alpha + 1) * max|f'| with max|f'| = 2
    factors = [r.rhs / 2 for r in rows]
    assert factors == pytest.approx([(1 - 2**-a) / (a + 1) for a in (0.5, 1.0, 2.0)], rel=1e-15)
    assert factors[0] == pytest.approx(0.19526214587563498)
    assert all(r.status == "holds" for r in rows)


def test_scan_ratio_not_available_for_zero_rhs():
    rows = alpha_scan(ScanPlan(_case(f="3"), (0.5,)))
    assert rows[0].ratio is None and rows[0].as_dict()["ratio"] == "n/a"


def test_scan_plan_validation():
    with pytest.raises(ValueError, match="strictly increasing"):
        ScanPlan(_case(), (1.0, 0.5))
    with pytest.raises(ValueError, match="alpha must be positive"):
        ScanPlan(_case(), (-1.0, 0.5))
    with pytest.raises(ValueError, match="for this theorem"):
        ScanPlan(_case("T2_4", exponents=ExponentPair.from_p(2)), (0.5, 1.5))


def test_scan_marks_failed_rows_and_continues():
    case = InequalityCase("T1_3", f="log(x)", a=0, b=1)
    rows = alpha_scan(ScanPlan(case, (0.5, 1.0)))
    assert [r.status for r in rows] == ["failed", "failed"]
    assert rows[0].error and math.isnan(rows[0].lhs)


def test_scan_independent_of_threads():
    plan = ScanPlan(_case("T2_5", f="exp(x)", q_power=3.0), parse_alpha_grid("0.25:2:0.25"))
    assert alpha_scan(plan, threads=1) == alpha_scan(plan, threads=8)


def test_parse_alpha_grid():
    assert parse_alpha_grid("0.25:1:0.25") == (0.25, 0.5, 0.75, 1.0)
    assert parse_alpha_grid("0.5, 1, 2") == (0.5, 1.0, 2.0)
    assert len(parse_alpha_grid("0.25:3:0.25")) == 12
    with pytest.raises(ValueError):
        parse_alpha_grid("0:1")
    with pytest.raises(ValueError):
        parse_alpha_grid("0:1:0")


def test_reduction_sweep_full_battery():
    rep = reduction_sweep(BATTERY, (0.5, 1.0, 2.0))
    assert rep.ok and rep.max_deviation <= 1e-12
    checks = {r.check for r in rep.rows}
    assert "T2_2 rhs vs alpha=1 bound" in checks and "T2_4 rhs vs alpha=1 Hoelder bound" in checks
    assert {r.function for r in rep.rows} == {b.name for b in BATTERY}


def test_reduction_sweep_alpha_one_row():
    rep = reduction_sweep([get("square")], (1.0,))
    row = next(r for r in rep.rows if r.check == "T2_2 rhs vs alpha=1 bound")
    assert row.reference == pytest.approx(0.25 * 1 * 2)


def test_reduction_sweep_empty():
    rep = reduction_sweep([], (0.5, 1.0))
    assert rep.rows == [] and rep.max_deviation == 0.0 and rep.ok


def test_family_parsing():
    assert parse_family("quadratic") is FAMILIES["quadratic"]
    fam = parse_family("a*x^2 + b; a=0:1; b=-1:1")
    assert fam.names == ("a", "b")
    assert fam.instantiate((0.5, 0.25)) is not None
    for bad in ("nonsense", "x^2; c=1", "c*x + foo; c=0:1", "c*x; c=2:1"):
        with pytest.raises(ValueError):
            parse_family(bad)


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(-1)
    assert SearchBudget(10).seed == DEFAULT_SEED == 0x48482012


def test_search_finds_witness_for_concave_family():
    out = counterexample_search("T1_2", SearchBudget(200), {"a": 0, "b": 1, "alpha": 1})
    assert out.found and out.evaluations <= 200
    assert out.result.status == "violated"
    again = verify(out.case)
    assert again.status == "violated" and again.margin == out.result.margin


def test_search_quasiconvex_subfamily_is_empty():
    out = counterexample_search(
        "T1_3", SearchBudget(200, family=FAMILIES["quasiconvex-quadratic"]), {"a": 0, "b": 1, "alpha": 1}
    )
    assert not out.found and out.evaluations == 200
    assert out.best.margin >= -1e-9


def test_search_zero_budget():
    out = counterexample_search("T1_2", SearchBudget(0), {"a": 0, "b": 1})
    assert not out.found and out.evaluations == 0 and out.trajectory == []


def test_search_deterministic_across_threads():
    budget = SearchBudget(60, seed=1234, family=FAMILIES["cubic"])
    a = counterexample_search("T1_3", budget, {"a": 0, "b": 1, "alpha": 0.5}, threads=1)
    b = counterexample_search("T1_3", budget, {"a": 0, "b": 1, "alpha": 0.5}, threads=8)
    assert a.trajectory == b.trajectory
    c = counterexample_search("T1_3", SearchBudget(60, seed=99, family=FAMILIES["cubic"]),
                              {"a": 0, "b": 1, "alpha": 0.5})
    assert c.trajectory != a.trajectory


def test_ordered_map_and_threads(monkeypatch):
    assert ordered_map(lambda v: v * v, list(range(50)), threads=8) == [v * v for v in range(50)]
    monkeypatch.setenv("FRACINEQ_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("FRACINEQ_THREADS", "zero")
    with pytest.raises(ValueError):
        thread_count()


@pytest.mark.parametrize("bf", smooth_battery(), ids=lambda b: b.name)
def test_certified_scans_hold(bf):
    rows = alpha_scan(ScanPlan(InequalityCase("T1_3", f=bf.expr, a=bf.a, b=bf.b), (0.25, 0.5, 1.0, 2.0)))
    res = verify(InequalityCase("T1_3", f=bf.expr, a=bf.a, b=bf.b))
    if res.hypotheses_certified:
        assert all(r.margin >= -1e-9 for r in rows)
