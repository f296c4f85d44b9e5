import csv
import json
from pathlib import Path

import pytest

from fracineq import cli
from fracineq.config import json_schema, load_config, merge
from fracineq.report import dumps, fmt17

ROOT = Path(__file__).resolve().parents[1]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_integrate_examples(capsys):
    code, out, _ = run(capsys, "integrate", "--f", "x^2", "--a", "0", "--x", "1", "--alpha", "0.5")
    assert code == 0
    value = float(out.split()[1])
    assert abs(value - 0.6018022225) <= 1e-10
    assert "error_estimate" in out and "panels" in out
    code, out, _ = run(capsys, "integrate", "--f", "1", "--a", "0", "--x", "1", "--alpha", "1")
    assert code == 0 and float(out.split()[1]) == 1.0


def test_integrate_right_side(capsys):
    code, out, _ = run(capsys, "integrate", "--f", "x", "--a", "1", "--x", "0", "--alpha", "1", "--side", "right")
    assert code == 0 and float(out.split()[1]) == pytest.approx(0.5)


def test_integrate_negative_alpha(capsys):
    code, _, err = run(capsys, "integrate", "--f", "1", "--a", "0", "--x", "1", "--alpha", "-1")
    assert code == 2 and "alpha must be positive" in err


def test_integrate_non_convergence_exit(capsys):
    code, out, _ = run(capsys, "integrate", "--f", "exp(x)", "--a", "0", "--x", "1", "--alpha", "0.3",
                       "--nodes", "2", "--tol", "1e-15", "--method", "adaptive-bisection")
    assert code == 2 and "did not converge" in out


def test_verify_holds(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T1_3", "--f", "x^2", "--a", "0", "--b", "1", "--alpha", "1")
    assert code == 0
    assert "margin 0.3333333333333" in out


def test_verify_violated_with_witness(capsys, tmp_path):
    out_path = tmp_path / "t12.json"
    code, out, _ = run(capsys, "verify", "--theorem", "T1_2", "--f", "x*(1-x)", "--a", "0", "--b", "1",
                       "--alpha", "1", "--out", str(out_path))
    assert code == 1
    assert "violated" in out and "witness" in out
    doc = json.loads(out_path.read_text())
    assert doc["result"]["status"] == "violated"
    assert doc["result"]["hypotheses"][0]["witness"]["point"] == {"x": 0.0, "y": 1.0, "t": 0.5}


def test_verify_alpha_range(capsys):
    code, _, err = run(capsys, "verify", "--theorem", "T2_4", "--f", "x^2", "--a", "0", "--b", "1",
                       "--alpha", "1.5")
    assert code == 2 and "alpha must lie in (0,1] for this theorem" in err


def test_verify_inconclusive_exit(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"theorem": "T1_2", "f": "sqrt(x)", "a": 0, "b": 1, "alpha": 0.37,
                               "tol": 1e-30, "check_hypotheses": False}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 3 and "inconclusive" in out


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "--theorem", "T1_3", "--f", "x^", "--a", "0", "--b", "1")[0] == 2
    assert run(capsys, "verify", "--theorem", "NOPE", "--f", "x", "--a", "0", "--b", "1")[0] == 2
    code, _, err = run(capsys, "verify", "--theorem", "T1_3", "--f", "x")
    assert code == 2 and "invalid config" in err
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--bogus"])
    assert info.value.code == 2


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"theorem": "T1_3", "f": "x^2", "a": 0, "b": 1, "alpha": 0.5}))
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--config", str(cfg), "--alpha", "1", "--out", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["config"]["alpha"] == 1
    assert doc["result"]["margin"] == pytest.approx(1 / 3)


def test_unknown_config_fields_rejected(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"theorem": "T1_3", "f": "x^2", "a": 0, "b": 1, "colour": "red"}))
    code, _, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and "colour" in err
    with pytest.raises(ValueError):
        merge("scan", {"command": "verify"}, {})


def test_certify_condition_c(capsys):
    code, out, _ = run(capsys, "certify", "--property", "condition-c", "--eta", "y - x")
    assert code == 0 and "certified" in out
    residual = float(out.split("max residual")[1].split()[0])
    assert residual <= 1e-15
    code, out, _ = run(capsys, "certify", "--property", "condition-c", "--eta", "(y - x)^3", "--domain=-1,1")
    assert code == 1 and "witness" in out


def test_certify_other_properties(capsys):
    assert run(capsys, "certify", "--property", "quasiconvex", "--f", "x^2", "--a", "-1", "--b", "2")[0] == 0
    assert run(capsys, "certify", "--property", "prequasiinvex", "--f", "x*(1-x)", "--eta", "linear",
               "--domain", "0,1")[0] == 1
    assert run(capsys, "certify", "--property", "invex-set", "--eta", "scaled(2)", "--domain", "0,1")[0] == 1
    code, _, err = run(capsys, "certify", "--property", "quasiconvex", "--f", "x^2")
    assert code == 2 and "--a" in err


def test_scan_rows_and_csv(capsys, tmp_path):
    out_path = tmp_path / "scan.csv"
    code, _, _ = run(capsys, "scan", "--theorem", "T2_2", "--f", "x^2", "--a", "0", "--b", "1", "--eta", "linear",
                     "--alpha-grid", "0.5,1,2", "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(out_path.open()))
    assert list(rows[0]) == ["alpha", "lhs", "rhs", "margin", "ratio", "status"]
    assert [r["status"] for r in rows] == ["holds"] * 3
    assert float(rows[1]["margin"]) == pytest.approx(1 / 3)


def test_csv_and_json_carry_identical_numbers(capsys, tmp_path):
    args = ["scan", "--theorem", "T1_5", "--f", "exp(x)", "--a", "0", "--b", "1", "--q", "2",
            "--alpha-grid", "0.25:1:0.25"]
    run(capsys, *args, "--format", "csv", "--out", str(tmp_path / "s.csv"))
    run(capsys, *args, "--format", "json", "--out", str(tmp_path / "s.json"))
    rows = list(csv.DictReader((tmp_path / "s.csv").open()))
    text = (tmp_path / "s.json").read_text()
    doc = json.loads(text)
    for r, j in zip(rows, doc["result"]["rows"]):
        for col in ("lhs", "rhs", "margin"):
            assert r[col] == fmt17(j[col])
            assert fmt17(j[col]) in text


def test_search_writes_witness(capsys, tmp_path):
    out_path = tmp_path / "search.json"
    code, out, _ = run(capsys, "search", "--theorem", "T1_2", "--family", "quadratic", "--budget", "200",
                       "--out", str(out_path))
    assert code == 1 and "witness" in out
    doc = json.loads(out_path.read_text())
    w = doc["result"]["witness"]
    assert w["result"]["status"] == "violated"
    assert doc["config"]["seed"] == 0x48482012


def test_search_none_found(capsys):
    code, out, _ = run(capsys, "search", "--theorem", "T1_3", "--family", "quasiconvex-quadratic",
                       "--budget", "40")
    assert code == 0 and "no witness" in out


def test_report_round_trip(capsys, tmp_path):
    for argv in (
        ["verify", "--theorem", "T2_5", "--f", "exp(x)", "--a", "0", "--b", "1", "--alpha", "0.5", "--q", "3"],
        ["integrate", "--f", "exp(-x)", "--a", "0", "--x", "2", "--alpha", "0.3"],
        ["certify", "--property", "eq-1-5", "--eta", "linear", "--random-samples", "100"],
        ["search", "--theorem", "T1_2", "--budget", "20", "--seed", "0x10"],
        ["scan", "--theorem", "T1_3", "--f", "log(x)", "--a", "0", "--b", "1", "--alpha-grid", "0.5,1"],
    ):
        path = tmp_path / f"{argv[0]}.json"
        run(capsys, *argv, "--format", "json", "--out", str(path))
        code, out, _ = run(capsys, "report", str(path), "--out", str(tmp_path / "again.json"))
        assert code == 0 and "reproduced" in out, argv
        assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_report_detects_tampering(capsys, tmp_path):
    path = tmp_path / "v.json"
    run(capsys, "verify", "--theorem", "T1_3", "--f", "x^2", "--a", "0", "--b", "1", "--out", str(path))
    doc = json.loads(path.read_text())
    doc["result"]["lhs"] = 0.5
    path.write_text(dumps(doc))
    code, out, _ = run(capsys, "report", str(path))
    assert code == 1 and "MISMATCH" in out


def test_stdout_report(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T1_3", "--f", "x^2", "--a", "0", "--b", "1",
                       "--format", "csv", "--out", "-")
    assert code == 0 and out.startswith("alpha,lhs,rhs,margin,ratio,status\n")


def test_shipped_schema_is_current():
    shipped = json.loads((ROOT / "docs" / "runconfig.schema.json").read_text())
    assert shipped == json.loads(json.dumps(json_schema()))


def test_load_config_validates():
    cfg = load_config({"command": "scan", "theorem": "T1_3", "f": "x", "a": 0, "b": 1, "domain": "0,1"})
    assert cfg.domain == (0.0, 1.0) and cfg.format == "csv"
    with pytest.raises(ValueError):
        load_config({"command": "search", "theorem": "T1_2", "budget": -3})
