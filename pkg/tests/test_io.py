import numpy as np
import pytest

from shiftmean import io
from shiftmean.errors import ParameterError
from shiftmean.fourier import PeriodicSignal, curves_to_coeffs
from shiftmean.meyer import WaveletBasisSpec, WaveletCoeffs
from shiftmean.registration import DescentConfig, estimate_shifts


def test_signal_round_trip(tmp_path, rng):
    s = PeriodicSignal(rng.standard_normal(64))
    back = io.read_signal(io.write_signal(tmp_path / "s.csv", s))
    assert np.array_equal(back.samples, s.samples)


def test_coeffs_round_trip(tmp_path, rng):
    c = curves_to_coeffs(rng.standard_normal((3, 32)))
    back = io.read_coeffs_matrix(io.write_coeffs_matrix(tmp_path / "c.csv", c))
    assert np.array_equal(back.rows, c.rows)


def test_wavelet_round_trip(tmp_path, rng):
    spec = WaveletBasisSpec(2, 4)
    w = WaveletCoeffs(2, rng.standard_normal(4), tuple(rng.standard_normal(2**j) for j in spec.levels))
    path = io.write_wavelet_coeffs(tmp_path / "w.csv", w)
    assert {r["kind"] for r in io.read_csv(path)} == {"coarse", "detail"}
    back = io.read_wavelet_coeffs(path)
    assert np.array_equal(back.coarse, w.coarse)
    assert all(np.array_equal(a, b) for a, b in zip(back.details, w.details))


def test_dataset_round_trip(tmp_path, rng):
    Y, taus = rng.standard_normal((4, 16)), rng.uniform(-0.2, 0.2, 4)
    path = io.write_dataset(tmp_path / "d.csv", Y, taus)
    assert (tmp_path / "d_shifts.csv").exists()
    Y2, t2 = io.read_dataset(path)
    assert np.array_equal(Y, Y2) and np.array_equal(taus, t2)
    io.write_dataset(tmp_path / "e.csv", Y)
    assert io.read_dataset(tmp_path / "e.csv")[1] is None


def test_trace_csv(tmp_path, rng):
    c = curves_to_coeffs(rng.standard_normal((5, 32)))
    _, trace = estimate_shifts(c, DescentConfig(ell0=3))
    rows = io.read_csv(io.write_trace(tmp_path / "t.csv", trace), ["iter", "M", "step", "grad_norm"])
    assert len(rows) == len(trace.values)


def test_byte_determinism(tmp_path, rng):
    Y = rng.standard_normal((3, 8))
    a = io.write_dataset(tmp_path / "a.csv", Y).read_bytes()
    b = io.write_dataset(tmp_path / "b.csv", Y).read_bytes()
    assert a == b and b"\r\n" in a


def test_json_non_finite(tmp_path):
    path = io.write_json(tmp_path / "x.json", {"a": float("inf"), "b": np.float64(2.5), "c": np.arange(2)})
    assert io.read_json(path) == {"a": None, "b": 2.5, "c": [0, 1]}


@pytest.mark.parametrize("content,match", [
    ("m,i,z\r\n0,0,1\r\n", "expected columns"),
    ("m,i,y\r\n0,0,abc\r\n", "not a number"),
    ("m,i,y\r\n0,0,1\r\n1,1,1\r\n", "expected 2 x 2"),
])
def test_bad_dataset(tmp_path, content, match):
    p = tmp_path / "bad.csv"
    p.write_text(content)
    with pytest.raises(ParameterError, match=match):
        io.read_dataset(p)


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(ParameterError, match="no such file"):
        io.read_json(tmp_path / "nope.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ParameterError, match="invalid JSON"):
        io.read_json(tmp_path / "bad.json")
