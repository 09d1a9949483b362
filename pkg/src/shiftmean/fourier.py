"""Spectral representation of periodic signals and of observed curves.

Convention used throughout the package::

    theta_l = int_0^1 f(x) exp(-2 i pi l x) dx      (analysis)
    f(x)    = sum_l theta_l exp(+2 i pi l x)        (synthesis)

On a grid of ``N = 2**J`` points both integrals become the DFT, which is exact
for signals band-limited below ``N/2``.  With this convention a curve observed
as ``f(x - tau)`` has coefficients ``theta_l * exp(-2 i pi l tau)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConjugateSymmetryError, ParameterError

__all__ = [
    "PeriodicSignal",
    "FourierCoeffs",
    "CurveCoeffsMatrix",
    "is_power_of_two",
    "to_fourier",
    "from_fourier",
    "curves_to_coeffs",
    "sample_mean_coeffs",
    "deconvolve",
]


def is_power_of_two(n: int) -> bool:
    return isinstance(n, (int, np.integer)) and n > 0 and (int(n) & (int(n) - 1)) == 0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PeriodicSignal:
    """Samples of a 1-periodic function at ``x_i = i/N``, ``N = 2**J``, ``J >= 3``."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1:
            raise ParameterError("samples must be one-dimensional")
        if not is_power_of_two(s.size) or s.size < 8:
            raise ParameterError(f"grid size must be a power of two >= 8, got {s.size}")
        if not np.all(np.isfinite(s)):
            raise ParameterError("samples must be finite")
        object.__setattr__(self, "samples", _frozen(s))

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.grid_size) / self.grid_size

    def norm(self) -> float:
        """L2([0,1]) norm by grid quadrature."""
        return float(np.sqrt(np.mean(self.samples**2)))

    def __len__(self) -> int:
        return self.grid_size


@dataclass(frozen=True, eq=False)
class FourierCoeffs:
    """Complex coefficients for ``l = -L..L`` stored at position ``l + L``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ParameterError("coefficient array must be 1-D with odd length 2L+1")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def max_freq(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def freqs(self) -> np.ndarray:
        L = self.max_freq
        return np.arange(-L, L + 1)

    def at(self, ell):
        """Coefficient(s) at frequency ``ell`` (scalar or array)."""
        ell = np.asarray(ell)
        if np.any(np.abs(ell) > self.max_freq):
            raise ParameterError(f"frequency outside -{self.max_freq}..{self.max_freq}")
        return self.coeffs[ell + self.max_freq]

    def truncate(self, L: int) -> "FourierCoeffs":
        if L > self.max_freq or L < 0:
            raise ParameterError(f"cannot truncate max_freq {self.max_freq} to {L}")
        m = self.max_freq
        return FourierCoeffs(self.coeffs[m - L : m + L + 1])

    def pad(self, L: int) -> "FourierCoeffs":
        if L < self.max_freq:
            return self.truncate(L)
        out = np.zeros(2 * L + 1, dtype=complex)
        m = self.max_freq
        out[L - m : L + m + 1] = self.coeffs
        return FourierCoeffs(out)

    def energy(self) -> float:
        """``sum |theta_l|^2``, i.e. the squared L2 norm of the synthesised signal."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def is_conjugate_symmetric(self, atol: float = 1e-12) -> bool:
        c = self.coeffs
        return bool(np.allclose(c, np.conj(c[::-1]), rtol=0.0, atol=atol * max(1.0, np.abs(c).max(initial=0.0))))


@dataclass(frozen=True, eq=False)
class CurveCoeffsMatrix:
    """Fourier coefficients ``c_{m,l}`` of ``n`` curves, rows share ``l = -L..L``."""

    rows: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rows, dtype=complex)
        if r.ndim != 2 or r.shape[1] % 2 != 1:
            raise ParameterError("rows must be a 2-D array of shape (n, 2L+1)")
        object.__setattr__(self, "rows", _frozen(r))

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def max_freq(self) -> int:
        return (self.rows.shape[1] - 1) // 2

    @property
    def freqs(self) -> np.ndarray:
        L = self.max_freq
        return np.arange(-L, L + 1)

    def row(self, m: int) -> FourierCoeffs:
        return FourierCoeffs(self.rows[m])

    def truncate(self, L: int) -> "CurveCoeffsMatrix":
        if L > self.max_freq or L < 0:
            raise ParameterError(f"cannot truncate max_freq {self.max_freq} to {L}")
        m = self.max_freq
        return CurveCoeffsMatrix(self.rows[:, m - L : m + L + 1])


def grid_for(L: int) -> int:
    """Smallest power-of-two grid that carries frequencies ``|l| <= L``."""
    N = 8
    while N // 2 <= L:
        N *= 2
    return N


def _check_L(L: int, N: int) -> int:
    if not isinstance(L, (int, np.integer)) or L < 0 or L > N // 2 - 1:
        raise ParameterError(f"frequency bound L={L} outside 0..{N // 2 - 1} for N={N}")
    return int(L)


def to_fourier(signal: PeriodicSignal, L: int | None = None) -> FourierCoeffs:
    N = signal.grid_size
    L = N // 2 - 1 if L is None else _check_L(L, N)
    spec = np.fft.fft(signal.samples) / N
    return FourierCoeffs(spec[np.arange(-L, L + 1) % N])


def from_fourier(coeffs: FourierCoeffs, N: int) -> PeriodicSignal:
    if not is_power_of_two(N):
        raise ParameterError(f"grid size must be a power of two, got {N}")
    L = coeffs.max_freq
    if N // 2 <= L:
        raise ParameterError(f"grid size {N} cannot carry frequencies up to {L}")
    full = np.zeros(N, dtype=complex)
    full[np.arange(-L, L + 1) % N] = coeffs.coeffs
    values = np.fft.ifft(full) * N
    scale = np.abs(values.real).max(initial=0.0)
    residue = np.abs(values.imag).max(initial=0.0)
    if residue > 1e-8 * max(scale, 1e-300):
        raise ConjugateSymmetryError(
            f"imaginary residue {residue:.3e} exceeds tolerance for signal scale {scale:.3e}"
        )
    return PeriodicSignal(values.real)


def curves_to_coeffs(curves: Sequence[PeriodicSignal] | np.ndarray, L: int | None = None) -> CurveCoeffsMatrix:
    """Fourier coefficients of every curve (rows of a 2-D array or a list of signals)."""
    if isinstance(curves, np.ndarray):
        Y = np.asarray(curves, dtype=float)
    else:
        sizes = {c.grid_size for c in curves}
        if len(sizes) > 1:
            raise ParameterError(f"curves live on different grids: {sorted(sizes)}")
        Y = np.stack([c.samples for c in curves]) if len(curves) else np.empty((0, 8))
    if Y.ndim != 2 or Y.shape[0] == 0:
        raise ParameterError("need at least one curve")
    N = Y.shape[1]
    if not is_power_of_two(N):
        raise ParameterError(f"grid size must be a power of two, got {N}")
    L = N // 2 - 1 if L is None else _check_L(L, N)
    spec = np.fft.fft(Y, axis=1) / N
    return CurveCoeffsMatrix(spec[:, np.arange(-L, L + 1) % N])


def sample_mean_coeffs(curves: CurveCoeffsMatrix) -> FourierCoeffs:
    if curves.n < 1:
        raise ParameterError("empty curve matrix")
    return FourierCoeffs(curves.rows.mean(axis=0))


def deconvolve(ctilde: FourierCoeffs, density_or_gamma, floor: float | None = None):
    """Divide by the shift eigenvalues, zeroing frequencies where ``|gamma_l| < floor``.

    ``density_or_gamma`` is either a shift density (exposing ``gamma``) or an
    array of eigenvalues aligned with ``ctilde.freqs``.  Returns
    ``(theta_hat, zeroed_freqs)``.
    """
    freqs = ctilde.freqs
    if hasattr(density_or_gamma, "gamma"):
        gam = np.asarray(density_or_gamma.gamma(freqs), dtype=complex)
    else:
        gam = np.asarray(density_or_gamma, dtype=complex)
        if gam.shape != freqs.shape:
            raise ParameterError("eigenvalue array does not match the frequency range")
    mag = np.abs(gam)
    if floor is None:
        floor = 1e-12 * mag.max(initial=0.0)
    if not floor > 0:
        raise ParameterError("floor must be positive")
    keep = mag >= floor
    out = np.zeros_like(ctilde.coeffs)
    out[keep] = ctilde.coeffs[keep] / gam[keep]
    return FourierCoeffs(out), freqs[~keep]
