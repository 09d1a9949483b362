"""Periodized Meyer wavelets, evaluated entirely in the Fourier domain.

The mother wavelet and the scaling function are band-limited, so the
periodized ``psi_{j,k}`` has finitely many non-zero Fourier coefficients

    psi^{j,k}_l = 2^{-j/2} exp(-2 i pi l k / 2^j) psihat(l / 2^j)

with ``psihat`` non-zero for ``1/3 < |xi| < 4/3``; the scaling window is
non-zero for ``|xi| < 2/3``.  Wavelet coefficients of a real signal are
``beta_{j,k} = sum_l conj(psi^{j,k}_l) theta_l`` (Parseval), which is real.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .fourier import FourierCoeffs

__all__ = [
    "WaveletBasisSpec",
    "FrequencySet",
    "WaveletCoeffs",
    "meyer_aux",
    "scaling_window",
    "wavelet_window",
    "psi_fourier",
    "phi_fourier",
    "omega",
    "omega_scaling",
    "max_level",
    "required_max_freq",
    "clamp_levels",
    "analyze",
    "synthesize",
    "basis_matrix",
]


def meyer_aux(t, degree: int = 3):
    """Auxiliary polynomial with ``nu(t) + nu(1-t) = 1``; ``degree=3`` gives
    ``t^4 (35 - 84 t + 70 t^2 - 20 t^3)``."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    s = sum(math.comb(degree + k, k) * (1.0 - t) ** k for k in range(degree + 1))
    return t ** (degree + 1) * s


def scaling_window(xi, degree: int = 3):
    """|phihat| at normalized frequency ``xi`` (cycles per unit length)."""
    a = np.abs(np.asarray(xi, dtype=float))
    out = np.where(a <= 1 / 3, 1.0, np.cos(0.5 * np.pi * meyer_aux(3 * a - 1, degree)))
    return np.where(a < 2 / 3, out, 0.0)


def wavelet_window(xi, degree: int = 3):
    """psihat at normalized frequency ``xi``, phase chosen so psi is symmetric about 1/2."""
    xi = np.asarray(xi, dtype=float)
    a = np.abs(xi)
    low = np.sin(0.5 * np.pi * meyer_aux(3 * a - 1, degree))
    high = np.cos(0.5 * np.pi * meyer_aux(1.5 * a - 1, degree))
    mag = np.where(a <= 2 / 3, low, high)
    mag = np.where((a > 1 / 3) & (a < 4 / 3), mag, 0.0)
    return mag * np.exp(-1j * np.pi * xi)


@dataclass(frozen=True)
class WaveletBasisSpec:
    j0: int = 3
    j1: int = 7
    window_degree: int = 3

    def __post_init__(self):
        if self.j0 < 0 or self.j1 < self.j0:
            raise ParameterError(f"need 0 <= j0 <= j1, got j0={self.j0}, j1={self.j1}")
        if self.window_degree < 0:
            raise ParameterError("window_degree must be >= 0")

    @property
    def levels(self) -> range:
        return range(self.j0, self.j1 + 1)


@dataclass(frozen=True)
class FrequencySet:
    level: int
    indices: np.ndarray

    def __len__(self) -> int:
        return self.indices.size

    def __contains__(self, ell) -> bool:
        return bool(np.any(self.indices == ell))


@lru_cache(maxsize=None)
def _omega_indices(j: int) -> np.ndarray:
    # 2^j/3 < |l| < 2^{j+2}/3 in exact integer arithmetic
    hi = -(-(2 ** (j + 2)) // 3) - 1
    lo = 2**j // 3 + 1
    pos = np.arange(lo, hi + 1)
    idx = np.concatenate([-pos[::-1], pos])
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def _omega_scaling_indices(j0: int) -> np.ndarray:
    hi = -(-(2 ** (j0 + 1)) // 3) - 1
    idx = np.arange(-hi, hi + 1)
    idx.setflags(write=False)
    return idx


def omega(j: int) -> FrequencySet:
    """Integer frequencies where the level-``j`` wavelets have non-zero coefficients."""
    if j < 0:
        raise ParameterError("level must be >= 0")
    return FrequencySet(j, _omega_indices(int(j)))


def omega_scaling(j0: int) -> FrequencySet:
    if j0 < 0:
        raise ParameterError("level must be >= 0")
    return FrequencySet(j0, _omega_scaling_indices(int(j0)))


def required_max_freq(spec: WaveletBasisSpec) -> int:
    return int(max(_omega_indices(spec.j1).max(), _omega_scaling_indices(spec.j0).max()))


def max_level(N: int) -> int:
    """Finest level whose frequencies all lie below ``N/2`` on an ``N``-point grid."""
    j = 0
    while -(-(2 ** (j + 3)) // 3) <= N // 2:
        j += 1
    return j


def clamp_levels(spec: WaveletBasisSpec, N: int) -> WaveletBasisSpec:
    """Lower ``j1`` (and ``j0`` if needed) to what an ``N``-point grid supports, warning if so."""
    top = max_level(N)
    if spec.j1 <= top:
        return spec
    warnings.warn(f"j1={spec.j1} exceeds the grid ceiling {top} for N={N}; clamping", stacklevel=2)
    return WaveletBasisSpec(min(spec.j0, top), top, spec.window_degree)


def _check_k(j: int, k) -> None:
    k = np.asarray(k)
    if np.any(k < 0) or np.any(k >= 2**j):
        raise ParameterError(f"location k must lie in 0..{2 ** j - 1} at level {j}")


def psi_fourier(j: int, k, ell, degree: int = 3):
    _check_k(j, k)
    ell = np.asarray(ell, dtype=float)
    scale = 2.0**j
    out = 2.0 ** (-j / 2) * np.exp(-2j * np.pi * ell * np.asarray(k) / scale) * wavelet_window(ell / scale, degree)
    return out if out.ndim else complex(out)


def phi_fourier(j0: int, k, ell, degree: int = 3):
    _check_k(j0, k)
    ell = np.asarray(ell, dtype=float)
    scale = 2.0**j0
    out = 2.0 ** (-j0 / 2) * np.exp(-2j * np.pi * ell * np.asarray(k) / scale) * scaling_window(ell / scale, degree)
    return out if out.ndim else complex(out)


@dataclass(frozen=True, eq=False)
class WaveletCoeffs:
    """Coarse ``c_{j0,k}`` and detail ``beta_{j,k}`` (one array per level j0..j1)."""

    j0: int
    coarse: np.ndarray
    details: tuple

    def __post_init__(self):
        c = np.array(self.coarse, dtype=float)
        if c.shape != (2**self.j0,):
            raise ParameterError(f"coarse coefficients must have length {2 ** self.j0}")
        ds = []
        for i, d in enumerate(self.details):
            d = np.array(d, dtype=float)
            if d.shape != (2 ** (self.j0 + i),):
                raise ParameterError(f"level {self.j0 + i} needs {2 ** (self.j0 + i)} coefficients")
            d.setflags(write=False)
            ds.append(d)
        c.setflags(write=False)
        object.__setattr__(self, "coarse", c)
        object.__setattr__(self, "details", tuple(ds))

    @property
    def j1(self) -> int:
        return self.j0 + len(self.details) - 1

    def level(self, j: int) -> np.ndarray:
        return self.details[j - self.j0]

    def energy(self) -> float:
        return float(np.sum(self.coarse**2) + sum(np.sum(d**2) for d in self.details))

    def replace_details(self, details) -> "WaveletCoeffs":
        return WaveletCoeffs(self.j0, self.coarse, tuple(details))

    @classmethod
    def zeros(cls, spec: WaveletBasisSpec) -> "WaveletCoeffs":
        return cls(spec.j0, np.zeros(2**spec.j0), tuple(np.zeros(2**j) for j in spec.levels))


def _window_values(idx: np.ndarray, j: int, degree: int, scaling: bool) -> np.ndarray:
    xi = idx / 2.0**j
    w = scaling_window(xi, degree) if scaling else wavelet_window(xi, degree)
    return 2.0 ** (-j / 2) * np.asarray(w, dtype=complex)


def _fold_analyze(theta: FourierCoeffs, idx, j, degree, scaling):
    # beta_k = sum_l conj(w_l) e^{2 i pi l k / 2^j} theta_l, folded modulo 2^j
    a = np.conj(_window_values(idx, j, degree, scaling)) * theta.at(idx)
    P = 2**j
    A = np.zeros(P, dtype=complex)
    np.add.at(A, idx % P, a)
    return (np.fft.ifft(A) * P).real


def _direct_analyze(theta: FourierCoeffs, idx, j, degree, scaling):
    k = np.arange(2**j)
    fn = phi_fourier if scaling else psi_fourier
    mat = fn(j, k[:, None], idx[None, :], degree)
    return (np.conj(mat) @ theta.at(idx)).real


def analyze(theta: FourierCoeffs, spec: WaveletBasisSpec, method: str = "fft") -> WaveletCoeffs:
    """Wavelet coefficients of the signal with Fourier coefficients ``theta``.

    ``method="direct"`` evaluates the Plancherel sums with an explicit
    ``2^j x |Omega_j|`` matrix; ``"fft"`` folds the frequencies modulo ``2^j``
    and uses one inverse FFT per level.  Both agree to rounding.
    """
    need = required_max_freq(spec)
    if theta.max_freq < need:
        raise ParameterError(
            f"theta covers |l| <= {theta.max_freq} but levels {spec.j0}..{spec.j1} "
            f"need frequencies up to {need} (band {theta.max_freq + 1}..{need} missing)"
        )
    if method not in ("fft", "direct"):
        raise ParameterError(f"unknown analysis method {method!r}")
    run = _fold_analyze if method == "fft" else _direct_analyze
    d = spec.window_degree
    coarse = run(theta, _omega_scaling_indices(spec.j0), spec.j0, d, True)
    details = tuple(run(theta, _omega_indices(j), j, d, False) for j in spec.levels)
    return WaveletCoeffs(spec.j0, coarse, details)


def synthesize(w: WaveletCoeffs, spec: WaveletBasisSpec, L: int | None = None) -> FourierCoeffs:
    """Fourier coefficients (``l = -L..L``) of ``sum c phi + sum beta psi``."""
    need = required_max_freq(spec)
    L = need if L is None else L
    if L < need:
        raise ParameterError(f"L={L} does not cover basis frequencies up to {need}")
    if w.j0 != spec.j0 or w.j1 != spec.j1:
        raise ParameterError("wavelet coefficients do not match the basis levels")
    out = np.zeros(2 * L + 1, dtype=complex)
    d = spec.window_degree
    blocks = [(_omega_scaling_indices(spec.j0), spec.j0, w.coarse, True)]
    blocks += [(_omega_indices(j), j, w.level(j), False) for j in spec.levels]
    for idx, j, coef, scaling in blocks:
        spectrum = np.fft.fft(coef)
        out[idx + L] += _window_values(idx, j, d, scaling) * spectrum[idx % 2**j]
    return FourierCoeffs(out)


def basis_matrix(spec: WaveletBasisSpec, L: int | None = None):
    """All basis functions as rows of Fourier coefficients over ``l = -L..L``.

    Returns ``(labels, rows)`` with labels ``(kind, j, k)``.
    """
    need = required_max_freq(spec)
    L = need if L is None else L
    if L < need:
        raise ParameterError(f"L={L} does not cover basis frequencies up to {need}")
    freqs = np.arange(-L, L + 1)
    labels, rows = [], []
    d = spec.window_degree
    for k in range(2**spec.j0):
        labels.append(("coarse", spec.j0, k))
        rows.append(phi_fourier(spec.j0, k, freqs, d))
    for j in spec.levels:
        for k in range(2**j):
            labels.append(("detail", j, k))
            rows.append(psi_fourier(j, k, freqs, d))
    return labels, np.array(rows)
