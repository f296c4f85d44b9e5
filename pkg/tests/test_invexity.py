import math

import pytest

from fracineq.battery import BATTERY
from fracineq.expr import evaluate, parse
from fracineq.invexity import (
    CERTIFIED,
    VIOLATED,
    EtaMap,
    Interval,
    SamplingPlan,
    certify_preinvex,
    certify_prequasiinvex,
    certify_quasiconvex,
    check_condition_c,
    check_eq_1_5,
    check_invex_set,
    linear_eta,
    make_eta,
)

SMALL = SamplingPlan(grid_points=9, random_samples=500)


def test_interval_validation_and_inset():
    with pytest.raises(ValueError):
        Interval(1.0, 1.0)
    lo, hi = Interval(0.0, 1.0).sample_bounds()
    assert lo == pytest.approx(1e-9) and hi == pytest.approx(1 - 1e-9)
    assert Interval(0.0, 1.0, closed=True).sample_bounds() == (0.0, 1.0)


def test_eta_registry():
    assert make_eta("linear").at(3.0, 1.0) == 2.0
    assert make_eta("y - x").label == "linear"
    assert make_eta("zero").at(3.0, 1.0) == 0.0
    assert make_eta("scaled(2)").at(3.0, 1.0) == 4.0
    shifted = make_eta("shifted-linear(0.1)")
    assert shifted.at(0.5, 0.25) == pytest.approx(0.35)
    assert shifted.domain == Interval(0.0, 1.0)
    assert make_eta("(y - x)^3").at(2.0, 0.0) == 8.0
    with pytest.raises(ValueError):
        make_eta("z - x")


def test_invex_set_examples():
    assert check_invex_set(Interval(0, 10), linear_eta()).status == CERTIFIED
    rep = check_invex_set(Interval(0, 1), make_eta("scaled(2)"))
    assert rep.status == VIOLATED
    assert rep.max_violation > 0.5
    assert check_invex_set(Interval(-5, 5), make_eta("zero")).status == CERTIFIED


def test_invex_set_witness_is_outside():
    rep = check_invex_set(Interval(0, 1), make_eta("scaled(2)"))
    p = dict(rep.witness.point)
    z = p["x"] + p["t"] * 2 * (p["y"] - p["x"])
    assert not 0 < z < 1


def test_condition_c_examples():
    rep = check_condition_c(linear_eta(), Interval(-1, 1))
    assert rep.certified and rep.max_violation <= 1e-15
    cubic = check_condition_c(make_eta("(y - x)^3"), Interval(-1, 1))
    assert cubic.status == VIOLATED
    assert check_condition_c(make_eta("zero"), Interval(-1, 1)).certified


def test_condition_c_cubic_at_stated_point():
    eta = make_eta("(y - x)^3")
    x, y, t = 0.5, -0.5, 0.5
    d = eta.at(x, y)
    z = y + t * d
    assert abs(eta.at(y, z) + t * d) > 1e-3


def test_condition_c_witness_reproduces():
    eta = make_eta("(y - x)^3")
    rep = check_condition_c(eta, Interval(-1, 1))
    p = dict(rep.witness.point)
    d = eta.at(p["x"], p["y"])
    z = p["y"] + p["t"] * d
    resid = max(abs(eta.at(p["y"], z) + p["t"] * d), abs(eta.at(p["x"], z) - (1 - p["t"]) * d))
    assert resid == pytest.approx(rep.witness.lhs, rel=1e-12)
    assert resid > rep.tolerance
    assert check_condition_c(eta, Interval(-1, 1)) == rep


def test_condition_c_requires_domain():
    with pytest.raises(ValueError):
        check_condition_c(linear_eta())


def test_eq_1_5():
    rep = check_eq_1_5(linear_eta(), Interval(-1, 1))
    assert rep.certified and rep.max_violation <= 1e-15
    assert any("eta(z,z)" in n for n in rep.notes)
    bad = check_eq_1_5(make_eta("(y - x)^3"), Interval(-1, 1))
    assert bad.status == VIOLATED and bad.witness is not None


def test_quasiconvex_examples():
    assert certify_quasiconvex(parse("x^2"), -1, 2).certified
    rep = certify_quasiconvex(parse("x*(1-x)"), 0, 1)
    assert rep.status == VIOLATED
    p = dict(rep.witness.point)
    assert (p["x"], p["y"], p["t"]) in {(0.0, 1.0, 0.5), (1.0, 0.0, 0.5)}
    assert rep.witness.lhs == pytest.approx(0.25) and rep.witness.rhs == 0.0
    const = certify_quasiconvex(parse("3"), 0, 1)
    assert const.certified and const.max_violation == 0.0


def test_preinvex_examples():
    assert certify_preinvex(parse("x^2"), linear_eta(), Interval(-3, 3)).certified
    assert certify_preinvex(parse("x*(1-x)"), linear_eta(), Interval(0, 1)).status == VIOLATED


def test_prequasiinvex_examples():
    rep = certify_prequasiinvex(parse("x*(1-x)"), linear_eta(), Interval(0, 1, closed=True))
    assert rep.status == VIOLATED
    assert rep.witness.lhs == pytest.approx(0.25)
    zero = make_eta("zero")
    for bf in BATTERY:
        assert certify_prequasiinvex(bf.expr, zero, Interval(bf.a, bf.b), SMALL).certified


def test_violation_witnesses_reproduce():
    f = parse("x^4 - x^2")
    rep = certify_prequasiinvex(f, linear_eta(), Interval(-1, 1))
    p = dict(rep.witness.point)
    lhs = evaluate(f, p["x"] + p["t"] * (p["y"] - p["x"]))
    rhs = max(evaluate(f, p["x"]), evaluate(f, p["y"]))
    assert lhs == pytest.approx(rep.witness.lhs, abs=1e-15)
    assert lhs > rhs + rep.tolerance


@pytest.mark.parametrize("bf", BATTERY, ids=lambda b: b.name)
def test_quasiconvex_agrees_with_linear_prequasiinvex(bf):
    q = certify_quasiconvex(bf.expr, bf.a, bf.b, SMALL)
    p = certify_prequasiinvex(bf.expr, linear_eta(), Interval(bf.a, bf.b, closed=True), SMALL)
    assert q.status == p.status


@pytest.mark.parametrize("bf", BATTERY, ids=lambda b: b.name)
def test_preinvex_implies_prequasiinvex(bf):
    A = Interval(bf.a, bf.b)
    pre = certify_preinvex(bf.expr, linear_eta(), A, SMALL)
    if pre.certified:
        assert certify_prequasiinvex(bf.expr, linear_eta(), A, SMALL).certified


def test_report_invariants():
    rep = certify_quasiconvex(parse("x*(1-x)"), 0, 1)
    assert rep.witness.lhs > rep.witness.rhs + rep.tolerance
    assert rep.max_violation == pytest.approx(rep.witness.lhs - rep.witness.rhs)
    ok = certify_quasiconvex(parse("x^2"), 0, 1)
    assert ok.witness is None and ok.max_violation <= ok.tolerance
    d = rep.to_dict()
    assert d["status"] == VIOLATED and d["witness"]["point"]["t"] == 0.5


def test_seed_changes_samples_not_verdict():
    a = certify_quasiconvex(parse("x^2"), 0, 1, SamplingPlan(seed=1))
    b = certify_quasiconvex(parse("x^2"), 0, 1, SamplingPlan(seed=2))
    assert a.certified and b.certified
    assert a.samples_used == b.samples_used


def test_plan_validation():
    with pytest.raises(ValueError):
        SamplingPlan(grid_points=1)
    with pytest.raises(ValueError):
        SamplingPlan(random_samples=-1)


def test_eta_vectorised():
    import numpy as np

    eta = EtaMap(parse("y - 2*x", ("y", "x")))
    out = eta(np.array([1.0, 2.0]), np.array([0.5, 0.25]))
    assert list(out) == [0.0, 1.5]
    assert math.isclose(eta.at(1.0, 0.5), 0.0)
