"""Mean-pattern estimators built on the deconvolved spectrum.

All estimators take the Fourier coefficients of the observed curves
(:class:`CurveCoeffsMatrix`).  Noise levels are expressed in the white-noise
scale: a grid of ``N`` samples with per-sample standard deviation ``s``
corresponds to ``eps = s / sqrt(N)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .fourier import CurveCoeffsMatrix, FourierCoeffs, PeriodicSignal, deconvolve, from_fourier, grid_for, sample_mean_coeffs
from .meyer import (
    WaveletBasisSpec,
    WaveletCoeffs,
    analyze,
    clamp_levels,
    max_level,
    omega,
    synthesize,
    wavelet_window,
)
from .registration import DescentConfig, estimate_shifts
from .result import EstimateResult

__all__ = [
    "LinearFilter",
    "ThresholdPolicy",
    "SmoothnessParams",
    "EmpiricalGamma",
    "spectral_cutoff",
    "default_cutoff",
    "linear_risk_closed_form",
    "sigma_j",
    "threshold",
    "resolve_levels",
    "hard_threshold",
    "wavelet_estimate",
    "hard_threshold_estimate",
    "estimate_noise_variance",
    "gamma_hat",
    "g_hat",
    "estimate_fn1",
    "estimate_fn2",
]


@dataclass(frozen=True, eq=False)
class LinearFilter:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size % 2 != 1 or not np.all(np.isfinite(w)):
            raise ParameterError("filter weights must be a finite 1-D array of odd length")
        object.__setattr__(self, "weights", w)

    @property
    def max_freq(self) -> int:
        return (self.weights.size - 1) // 2

    @classmethod
    def projection(cls, M: int, L: int) -> "LinearFilter":
        ell = np.arange(-L, L + 1)
        return cls((np.abs(ell) <= M).astype(float))


@dataclass(frozen=True)
class ThresholdPolicy:
    """``eta`` scales the level thresholds; ``j0``/``j1`` of ``None`` use the defaults.

    ``j1_rule="grid"`` takes the finest level the grid supports, ``"theory"`` the
    largest ``j1`` with ``2^j1 <= (n / log n)^(1/(2 nu + 1))``.
    """

    eta: float = 1.5
    j0: int | None = None
    j1: int | None = None
    j1_rule: str = "grid"

    def __post_init__(self):
        if not self.eta > 0:
            raise ParameterError("eta must be > 0")
        if self.j1_rule not in ("grid", "theory"):
            raise ParameterError("j1_rule must be 'grid' or 'theory'")


@dataclass(frozen=True)
class SmoothnessParams:
    s: float
    nu: float

    def __post_init__(self):
        if not self.s > 0 or not self.nu >= 0:
            raise ParameterError("need s > 0 and nu >= 0")


class EmpiricalGamma:
    """Eigenvalues estimated from shifts ``tau_hat_1..tau_hat_n``.

    ``gamma(l) = 1/n sum_{m=2}^n exp(-2 i pi l tau_hat_m)``; the first shift is
    the one fixed by the zero-sum constraint and is left out of the sum.
    Eigenvalues below ``1/sqrt(n)`` are indistinguishable from zero.
    """

    def __init__(self, shifts, n: int | None = None):
        self.shifts = np.asarray(shifts, dtype=float)
        self.n = self.shifts.size if n is None else int(n)
        self.floor = 1.0 / math.sqrt(self.n)

    def gamma(self, ell):
        ell_a = np.atleast_1d(np.asarray(ell, dtype=float))
        out = np.exp(-2j * np.pi * np.outer(ell_a, self.shifts[1:])).sum(axis=1) / self.n
        return out.reshape(np.shape(ell)) if np.ndim(ell) else complex(out[0])


def gamma_hat(shifts, ell, n: int | None = None):
    return EmpiricalGamma(shifts, n).gamma(ell)


def g_hat(shifts, x, ell0: int, n: int | None = None):
    """Truncated Fourier inversion of the empirical eigenvalues; may be negative."""
    ell = np.arange(-ell0, ell0 + 1)
    gam = EmpiricalGamma(shifts, n).gamma(ell)
    x = np.asarray(x, dtype=float)
    vals = (gam * np.exp(2j * np.pi * np.multiply.outer(x, ell))).sum(axis=-1)
    return vals.real


def _grid_size(curves: CurveCoeffsMatrix, N: int | None) -> int:
    return grid_for(curves.max_freq) if N is None else int(N)


def spectral_cutoff(theta_hat: FourierCoeffs, M: int, N: int | None = None) -> EstimateResult:
    if M < 0:
        raise ParameterError("cut-off M must be >= 0")
    if M > theta_hat.max_freq:
        raise ParameterError(f"cut-off M={M} exceeds max_freq {theta_hat.max_freq}")
    kept = np.where(np.abs(theta_hat.freqs) <= M, theta_hat.coeffs, 0)
    coeffs = FourierCoeffs(kept)
    N = grid_for(theta_hat.max_freq) if N is None else N
    return EstimateResult(from_fourier(coeffs, N), coeffs, meta={"estimator": "cutoff", "M": int(M)})


def default_cutoff(n: int, sp: SmoothnessParams) -> int:
    if n < 2:
        raise ParameterError("need n >= 2")
    return max(1, int(round(n ** (1.0 / (2 * sp.s + 2 * sp.nu + 1)))))


def linear_risk_closed_form(theta: FourierCoeffs, density, filt: LinearFilter, eps: float, n: int) -> float:
    """Bias-variance decomposition of the risk of the filtered deconvolution estimator."""
    L = filt.max_freq
    if theta.max_freq < L:
        theta = theta.pad(L)
    th2 = np.abs(theta.coeffs) ** 2
    lam = np.zeros(theta.coeffs.size)
    off = theta.max_freq - L
    lam[off : off + filt.weights.size] = filt.weights
    gam2 = np.abs(np.asarray(density.gamma(theta.freqs))) ** 2
    active = lam != 0
    if np.any(gam2[active] == 0):
        raise DomainError("filter puts weight on a zero eigenvalue")
    bias = np.sum((lam - 1) ** 2 * th2)
    g = gam2[active]
    var = np.sum(lam[active] ** 2 * (th2[active] * (1 / g - 1) + eps**2 / g)) / n
    return float(bias + var)


def sigma_j(source, eps: float, j: int, floor: float | None = None) -> float:
    """``sqrt(2^-j eps^2 sum_{l in Omega_j} |gamma_l|^-2)``.

    For a known density, frequencies below ``floor`` (default ``1e-12``) are left
    out as in the deconvolution step.  For empirical eigenvalues the magnitudes
    are clipped from below at their ``1/sqrt(n)`` floor instead.
    """
    mags = np.abs(np.asarray(source.gamma(omega(j).indices)))
    if isinstance(source, EmpiricalGamma):
        mags = np.maximum(mags, source.floor)
    else:
        floor = 1e-12 if floor is None else floor
        mags = mags[mags >= floor]
        if mags.size == 0:
            raise DomainError(f"all eigenvalues on level {j} are below the floor")
    return float(math.sqrt(2.0**-j * eps**2 * np.sum(mags**-2.0)))


def threshold(j: int, n: int, eta: float, sigma: float) -> float:
    """Level threshold ``2 sigma_j sqrt(2 eta log(n) / n)``."""
    if n < 2:
        raise ParameterError("need n >= 2")
    return 2.0 * sigma * math.sqrt(2.0 * eta * math.log(n) / n)


def resolve_levels(n: int, nu: float, N: int, policy: ThresholdPolicy, window_degree: int = 3) -> WaveletBasisSpec:
    top = max_level(N)
    if policy.j0 is not None:
        j0 = policy.j0
    else:
        # 2^j0 <= log log n is below 3 for any practical n; floor at 3
        j0 = max(3, int(math.floor(math.log2(max(math.log(math.log(max(n, 3))), 1e-300)))))
        j0 = min(j0, top)
    if policy.j1 is not None:
        j1 = policy.j1
    elif policy.j1_rule == "theory":
        j1 = int(math.floor(math.log2((n / math.log(n)) ** (1.0 / (2 * nu + 1)))))
        j1 = min(max(j1, 3, j0), top)
    else:
        j1 = top
    return clamp_levels(WaveletBasisSpec(j0, max(j1, j0), window_degree), N)


def hard_threshold(w: WaveletCoeffs, lambdas) -> tuple[WaveletCoeffs, tuple]:
    """Zero detail coefficients with ``|beta| < lambda_j``; coarse ones are never touched."""
    details, kept = [], []
    for d, lam in zip(w.details, lambdas):
        keep = np.abs(d) >= lam
        details.append(np.where(keep, d, 0.0))
        kept.append(keep)
    return w.replace_details(details), tuple(kept)


def wavelet_estimate(theta_hat: FourierCoeffs, spec: WaveletBasisSpec, lambdas, N: int, meta: dict | None = None) -> EstimateResult:
    w = analyze(theta_hat, spec)
    w_kept, kept = hard_threshold(w, lambdas)
    theta_out = synthesize(w_kept, spec, max(theta_hat.max_freq, 0))
    meta = dict(meta or {})
    meta.setdefault("thresholds", list(zip(spec.levels, [float(v) for v in lambdas])))
    meta.setdefault("j0", spec.j0)
    meta.setdefault("j1", spec.j1)
    return EstimateResult(from_fourier(theta_out, N), theta_out, w_kept, kept, meta)


def _finest_details(rows: np.ndarray, L: int, j: int, degree: int) -> np.ndarray:
    idx = omega(j).indices
    if idx.max() > L:
        raise ParameterError(f"level {j} needs frequencies up to {idx.max()}, have {L}")
    win = np.conj(2.0 ** (-j / 2) * wavelet_window(idx / 2.0**j, degree))
    a = rows[:, idx + L] * win
    P = 2**j
    A = np.zeros((rows.shape[0], P), dtype=complex)
    for r in range(P):
        A[:, r] = a[:, idx % P == r].sum(axis=1)
    return (np.fft.ifft(A, axis=1) * P).real


def estimate_noise_variance(curves, spec: WaveletBasisSpec) -> float:
    """``eps_hat^2 = 1/n sum_m eps_hat_m^2`` from finest-level detail coefficients.

    Each ``eps_hat_m`` is ``median |beta_{j1,k}| / 0.6745`` for the m-th curve;
    unit-norm wavelets carry white noise of level ``eps`` with variance ``eps^2``.
    """
    if isinstance(curves, CurveCoeffsMatrix):
        rows, L = curves.rows, curves.max_freq
    elif isinstance(curves, FourierCoeffs):
        rows, L = curves.coeffs[None, :], curves.max_freq
    elif isinstance(curves, PeriodicSignal):
        from .fourier import to_fourier

        c = to_fourier(curves)
        rows, L = c.coeffs[None, :], c.max_freq
    else:
        raise ParameterError("expected curve coefficients or a signal")
    beta = _finest_details(rows, L, spec.j1, spec.window_degree)
    eps_m = np.median(np.abs(beta), axis=1) / 0.6745
    return float(np.mean(eps_m**2))


def _levels_for(curves, density_nu, policy, spec, N):
    if spec is None:
        spec = resolve_levels(max(curves.n, 2), density_nu, N, policy)
    return clamp_levels(spec, N)


def _deconvolution_estimate(curves, source, eps, policy, spec, N, floor, name, extra=None):
    n = curves.n
    N = _grid_size(curves, N)
    spec = _levels_for(curves, float(getattr(source, "nu", 0.0)), policy, spec, N)
    if eps is None:
        eps = math.sqrt(estimate_noise_variance(curves, spec))
    theta_hat, zeroed = deconvolve(sample_mean_coeffs(curves), source, floor)
    lambdas = []
    for j in spec.levels:
        try:
            lambdas.append(threshold(j, max(n, 2), policy.eta, sigma_j(source, eps, j)))
        except DomainError:
            lambdas.append(math.inf)
    meta = {
        "estimator": name,
        "n": n,
        "eps_hat": float(eps),
        "eta": policy.eta,
        "ell0": None,
        "zeroed_freqs": [int(v) for v in zeroed if v >= 0],
    }
    meta.update(extra or {})
    return wavelet_estimate(theta_hat, spec, lambdas, N, meta)


def hard_threshold_estimate(
    curves: CurveCoeffsMatrix,
    density,
    eps: float | None = None,
    policy: ThresholdPolicy = ThresholdPolicy(),
    spec: WaveletBasisSpec | None = None,
    N: int | None = None,
) -> EstimateResult:
    """Deconvolution by wavelet hard thresholding with a known shift density.

    ``eps=None`` estimates the noise level from the finest detail level.
    """
    return _deconvolution_estimate(curves, density, eps, policy, spec, N, None, "known_g")


def _shifts_or_estimate(curves, shifts, ell0):
    if shifts is not None:
        shifts = np.asarray(shifts, dtype=float)
        if shifts.shape != (curves.n,):
            raise ParameterError(f"expected {curves.n} shifts, got shape {shifts.shape}")
        return shifts
    taus, _ = estimate_shifts(curves, DescentConfig(ell0=ell0))
    return taus


def estimate_fn1(
    curves: CurveCoeffsMatrix,
    shifts=None,
    eps: float | None = None,
    policy: ThresholdPolicy = ThresholdPolicy(),
    spec: WaveletBasisSpec | None = None,
    ell0: int = 3,
    N: int | None = None,
    gamma_source=None,
) -> EstimateResult:
    """Deconvolution with eigenvalues estimated from the (estimated) shifts.

    ``gamma_source`` overrides the empirical eigenvalues, e.g. with a known density.
    """
    shifts = _shifts_or_estimate(curves, shifts, ell0)
    source = EmpiricalGamma(shifts) if gamma_source is None else gamma_source
    floor = source.floor if isinstance(source, EmpiricalGamma) else None
    return _deconvolution_estimate(curves, source, eps, policy, spec, N, floor, "fn1", {"ell0": ell0, "_shifts": shifts})


def estimate_fn2(
    curves: CurveCoeffsMatrix,
    shifts=None,
    eps: float | None = None,
    policy: ThresholdPolicy = ThresholdPolicy(),
    spec: WaveletBasisSpec | None = None,
    ell0: int = 3,
    N: int | None = None,
) -> EstimateResult:
    """Realign with the estimated shifts, then threshold with the fn1 thresholds.

    ``theta_l = 1/n sum_{m=2}^n c_{m,l} exp(2 i pi l tau_hat_m)``.
    """
    n = curves.n
    shifts = _shifts_or_estimate(curves, shifts, ell0)
    N = _grid_size(curves, N)
    spec = _levels_for(curves, 0.0, policy, spec, N)
    if eps is None:
        eps = math.sqrt(estimate_noise_variance(curves, spec))
    ell = curves.freqs
    theta = (curves.rows[1:] * np.exp(2j * np.pi * np.outer(shifts[1:], ell))).sum(axis=0) / n
    source = EmpiricalGamma(shifts)
    lambdas = [threshold(j, max(n, 2), policy.eta, sigma_j(source, eps, j)) for j in spec.levels]
    meta = {
        "estimator": "fn2",
        "n": n,
        "eps_hat": float(eps),
        "eta": policy.eta,
        "ell0": ell0,
        "zeroed_freqs": [],
        "_shifts": shifts,
    }
    return wavelet_estimate(FourierCoeffs(theta), spec, lambdas, N, meta)
