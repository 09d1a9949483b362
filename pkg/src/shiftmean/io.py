"""CSV and JSON readers and writers.

Floats are written with ``repr`` so files round-trip exactly and identical
inputs always produce byte-identical files.  CSV follows RFC 4180 with a
header row and ``\\r\\n`` line endings (the :mod:`csv` default).
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .fourier import CurveCoeffsMatrix, PeriodicSignal
from .meyer import WaveletCoeffs

__all__ = [
    "fmt",
    "write_csv",
    "read_csv",
    "write_signal",
    "read_signal",
    "write_coeffs_matrix",
    "read_coeffs_matrix",
    "write_wavelet_coeffs",
    "read_wavelet_coeffs",
    "write_trace",
    "write_shifts",
    "read_shifts",
    "write_dataset",
    "read_dataset",
    "write_json",
    "read_json",
]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def read_csv(path, expected_header=None) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise ParameterError(f"no such file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if expected_header is not None and list(reader.fieldnames or []) != list(expected_header):
            raise ParameterError(
                f"{path}: expected columns {list(expected_header)}, got {reader.fieldnames}"
            )
        return list(reader)


def _float(value: str, where: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{where}: not a number: {value!r}") from None


# -- signals -----------------------------------------------------------------

def write_signal(path, signal: PeriodicSignal, column: str = "value") -> Path:
    return write_csv(path, [column], ([v] for v in signal.samples))


def read_signal(path) -> PeriodicSignal:
    rows = read_csv(path)
    if not rows or len(rows[0]) != 1:
        raise ParameterError(f"{path}: expected a single-column CSV")
    (col,) = rows[0].keys()
    return PeriodicSignal(np.array([_float(r[col], f"{path} row {i}") for i, r in enumerate(rows)]))


# -- Fourier coefficients of curves --------------------------------------------

_COEFF_HEADER = ["m", "ell", "re", "im"]


def write_coeffs_matrix(path, curves: CurveCoeffsMatrix) -> Path:
    freqs = curves.freqs
    rows = (
        (m, int(ell), c.real, c.imag)
        for m in range(curves.n)
        for ell, c in zip(freqs, curves.rows[m])
    )
    return write_csv(path, _COEFF_HEADER, rows)


def read_coeffs_matrix(path) -> CurveCoeffsMatrix:
    rows = read_csv(path, _COEFF_HEADER)
    m = np.array([int(r["m"]) for r in rows])
    ell = np.array([int(r["ell"]) for r in rows])
    vals = np.array([_float(r["re"], "re") + 1j * _float(r["im"], "im") for r in rows])
    L = int(np.abs(ell).max())
    n = int(m.max()) + 1
    out = np.zeros((n, 2 * L + 1), dtype=complex)
    out[m, ell + L] = vals
    return CurveCoeffsMatrix(out)


# -- wavelet coefficients ---------------------------------------------------------

_WAVELET_HEADER = ["kind", "j", "k", "value"]


def write_wavelet_coeffs(path, w: WaveletCoeffs) -> Path:
    def rows():
        for k, v in enumerate(w.coarse):
            yield "coarse", w.j0, k, v
        for i, d in enumerate(w.details):
            for k, v in enumerate(d):
                yield "detail", w.j0 + i, k, v

    return write_csv(path, _WAVELET_HEADER, rows())


def read_wavelet_coeffs(path) -> WaveletCoeffs:
    rows = read_csv(path, _WAVELET_HEADER)
    coarse = [_float(r["value"], "value") for r in rows if r["kind"] == "coarse"]
    j0 = int(math.log2(len(coarse))) if coarse else 0
    levels: dict[int, list] = {}
    for r in rows:
        if r["kind"] == "detail":
            levels.setdefault(int(r["j"]), []).append(_float(r["value"], "value"))
        elif r["kind"] != "coarse":
            raise ParameterError(f"{path}: unknown coefficient kind {r['kind']!r}")
    details = tuple(np.array(levels[j]) for j in sorted(levels))
    return WaveletCoeffs(j0, np.array(coarse), details)


# -- shifts and descent traces -----------------------------------------------------

def write_shifts(path, taus) -> Path:
    return write_csv(path, ["tau"], ([float(t)] for t in np.asarray(taus, dtype=float)))


def read_shifts(path) -> np.ndarray:
    return np.array([_float(r["tau"], "tau") for r in read_csv(path, ["tau"])])


def write_trace(path, trace) -> Path:
    return write_csv(path, ["iter", "M", "step", "grad_norm"], trace.rows())


# -- datasets ------------------------------------------------------------------------

def write_dataset(path, curves, taus=None) -> Path:
    """Long-format ``(m, i, y)`` CSV plus ``<stem>_shifts.csv`` when shifts are given."""
    Y = np.asarray(curves, dtype=float)
    path = write_csv(path, ["m", "i", "y"], ((m, i, Y[m, i]) for m in range(Y.shape[0]) for i in range(Y.shape[1])))
    if taus is not None:
        write_shifts(path.with_name(path.stem + "_shifts.csv"), taus)
    return path


def read_dataset(path):
    """Return ``(curves, taus)``; ``taus`` is ``None`` without a sidecar file."""
    path = Path(path)
    rows = read_csv(path, ["m", "i", "y"])
    if not rows:
        raise ParameterError(f"{path}: empty dataset")
    m = np.array([int(r["m"]) for r in rows])
    i = np.array([int(r["i"]) for r in rows])
    y = np.array([_float(r["y"], "y") for r in rows])
    n, N = int(m.max()) + 1, int(i.max()) + 1
    if n * N != len(rows):
        raise ParameterError(f"{path}: expected {n} x {N} rows, found {len(rows)}")
    Y = np.full((n, N), np.nan)
    Y[m, i] = y
    if np.isnan(Y).any():
        raise ParameterError(f"{path}: missing (m, i) entries")
    side = path.with_name(path.stem + "_shifts.csv")
    taus = read_shifts(side) if side.exists() else None
    return Y, taus


# -- JSON ------------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n")
    return path


def read_json(path):
    path = Path(path)
    if not path.exists():
        raise ParameterError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON ({exc})") from None
