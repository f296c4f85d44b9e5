import json
import math

import numpy as np
import pytest

from fracineq.report import atomic_write, csv_text, dumps, fmt17, load, shortest


def test_seventeen_digits_round_trip():
    for x in (1 / 3, 0.1, 2.0, 1e-300, -123456.789, 0.6018022224509402):
        assert float(fmt17(x)) == x
    assert fmt17(1 / 3) == "0.33333333333333331"
    assert shortest(1 / 3) == "0.3333333333333333"


def test_dumps_is_valid_json_and_stable():
    doc = {"b": [1, 2.5, None, True], "a": {"x": 1 / 3, "nan": math.nan, "np": np.float64(0.1)}, "s": "é"}
    text = dumps(doc)
    back = json.loads(text)
    assert back["a"]["x"] == 1 / 3 and back["a"]["nan"] is None and back["a"]["np"] == 0.1
    assert list(back) == ["b", "a", "s"]
    assert dumps(back) == dumps(json.loads(dumps(back)))


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps({"x": object()})


def test_csv_text():
    text = csv_text(("a", "b", "c"), [{"a": 0.1, "b": "n/a", "c": True}, {"a": 2, "b": None}])
    assert text == "a,b,c\n0.10000000000000001,n/a,true\n2,,\n"


def test_atomic_write_replaces(tmp_path):
    target = tmp_path / "sub" / "r.json"
    atomic_write(target, "one")
    atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in target.parent.iterdir()] == ["r.json"]


def test_load_rejects_foreign_files(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{}")
    with pytest.raises(ValueError):
        load(p)
