import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from photonvel.export import dumps, fmt, read_csv, tagged, write_csv, write_json


@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trip(x):
    assert float(fmt(x)) == x


def test_negative_zero_and_integers():
    assert fmt(-0.0) == "0"
    assert fmt(np.int64(7)) == "7"
    assert fmt(True) == "1"
    assert fmt(math.nan) == "nan"


@given(data=st.lists(st.tuples(st.floats(-1e300, 1e300), st.floats(-1e-300, 1e-300)), min_size=1, max_size=20))
def test_csv_round_trip(tmp_path_factory, data):
    path = tmp_path_factory.mktemp("csv") / "t.csv"
    write_csv(path, ["a", "b"], data, params={"kw0": 5.0, "beam": "gaussian"})
    params, header, arr = read_csv(path)
    assert header == ["a", "b"]
    assert params == {"beam": "gaussian", "kw0": "5"}
    assert np.array_equal(arr, np.array(data) + 0.0)


def test_json_sorted_and_deterministic(tmp_path):
    obj = {"b": np.float64(1.5), "a": [np.int32(2), np.bool_(True)], "c": tagged(math.inf, "numeric")}
    text = dumps(obj)
    assert list(json.loads(text)) == ["a", "b", "c"]
    assert json.loads(text)["c"] == {"method": "numeric", "value": "inf"}
    p1, p2 = write_json(tmp_path / "x.json", obj), write_json(tmp_path / "y.json", dict(reversed(obj.items())))
    assert p1.read_bytes() == p2.read_bytes()
