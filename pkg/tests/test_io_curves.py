import numpy as np
import pytest

from latchem2d.curves import EffectivePotentialCurve, PotentialCurve
from latchem2d.errors import DomainError
from latchem2d.io import (canonical_json, csv_text, decode_blob, encode_blob, params_hash, read_blob,
                          write_blob)


def test_blob_round_trip(tmp_path):
    arrays = {"a": np.arange(6, dtype=np.int64).reshape(2, 3), "b": np.array([1 + 2j, -0.5j])}
    write_blob(tmp_path / "x.lc2d", {"kind": "test"}, arrays)
    header, back = read_blob(tmp_path / "x.lc2d")
    assert header["kind"] == "test"
    for k, v in arrays.items():
        assert back[k].dtype == v.dtype and np.array_equal(back[k], v)


def test_blob_rejects_bad_magic():
    data = bytearray(encode_blob({}, {"a": np.zeros(2)}))
    data[:4] = b"XXXX"
    with pytest.raises(ValueError):
        decode_blob(bytes(data))


def test_params_hash_is_order_independent():
    assert params_hash({"a": 1, "b": [1, 2]}) == params_hash({"b": [1, 2], "a": 1})
    assert params_hash({"a": 1}) != params_hash({"a": 2})
    assert canonical_json({"b": 1, "a": 2}).index('"a"') < canonical_json({"b": 1, "a": 2}).index('"b"')


def test_csv_floats_round_trip():
    text = csv_text(["x"], [(0.1 + 0.2,)])
    assert float(text.splitlines()[1]) == 0.1 + 0.2


def test_potential_curve_csv(tmp_path):
    c = PotentialCurve([1, 2, 3], [-1.0, -1.2, -1.1], extra={"d_over_a": [2, 4, 6]})
    c.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "d_over_a0,E_over_Ry,d_over_a"
    assert c.argmin() == 1


def test_effective_curve_interpolation_and_extrapolation():
    c = EffectivePotentialCurve([1, 2, 4], [4.0, 2.0, 1.0], "tabulated")
    assert c(3.0) == pytest.approx(1.5)
    with pytest.raises(DomainError):
        c(5.0)
    hold = EffectivePotentialCurve([1, 2, 4], [4.0, 2.0, 1.0], extrapolate="hold")
    zero = EffectivePotentialCurve([1, 2, 4], [4.0, 2.0, 1.0], extrapolate="zero")
    assert hold(9.0) == 1.0 and zero(9.0) == 0.0 and zero(0.5) == 4.0
    assert c.is_positive_decreasing()
    assert c.scaled(2.0, "t_F")(2.0) == pytest.approx(4.0)


def test_effective_curve_validation():
    with pytest.raises(DomainError):
        EffectivePotentialCurve([2, 1], [1.0, 2.0])
    with pytest.raises(DomainError):
        EffectivePotentialCurve([1, 2], [1.0, 2.0], law="yukawa")
