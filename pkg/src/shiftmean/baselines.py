"""Reference estimators: the direct mean and the Procrustean mean."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError
from .fourier import PeriodicSignal

__all__ = ["ProcrustesConfig", "cyclic_shift", "cyclic_shift_rows", "direct_mean", "procrustean_mean"]


@dataclass(frozen=True)
class ProcrustesConfig:
    i_max: int = 3
    refine: bool = True

    def __post_init__(self):
        if self.i_max < 1:
            raise ParameterError("i_max must be >= 1")


def _shift_factors(N: int, taus) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    k = np.fft.rfftfreq(N, 1.0 / N)
    phase = np.exp(-2j * np.pi * np.multiply.outer(taus, k))
    # Nyquist bin: split evenly between +-N/2 so the result stays real
    phase[..., -1] = np.cos(np.pi * N * taus)
    return phase


def cyclic_shift_rows(Y: np.ndarray, taus) -> np.ndarray:
    """Row-wise ``Y_m(x - tau_m)`` by spectral phase shift."""
    Y = np.asarray(Y, dtype=float)
    N = Y.shape[-1]
    out = np.fft.irfft(np.fft.rfft(Y, axis=-1) * _shift_factors(N, taus), n=N, axis=-1)
    # whole-grid shifts are plain rotations; use them so those rows stay bit-exact
    k = np.asarray(taus, dtype=float) * N
    if out.ndim == 1:
        return np.roll(Y, int(k)) if k == np.round(k) else out
    k = np.broadcast_to(k, out.shape[:-1])
    src = np.broadcast_to(Y, out.shape)
    for idx in zip(*np.nonzero(k == np.round(k))):
        out[idx] = np.roll(src[idx], int(k[idx]))
    return out


def cyclic_shift(signal: PeriodicSignal, tau: float) -> PeriodicSignal:
    """``f(. - tau)``; exact for band-limited signals and for grid shifts ``tau = k/N``."""
    return PeriodicSignal(cyclic_shift_rows(signal.samples, tau))


def _as_matrix(curves) -> np.ndarray:
    if isinstance(curves, np.ndarray):
        Y = np.asarray(curves, dtype=float)
        if Y.ndim != 2:
            raise ParameterError("curve array must be 2-D (n, N)")
        return Y
    if not len(curves):
        raise ParameterError("need at least one curve")
    sizes = {c.grid_size for c in curves}
    if len(sizes) != 1:
        raise ParameterError(f"curves live on different grids: {sorted(sizes)}")
    return np.stack([c.samples for c in curves])


def direct_mean(curves: Sequence[PeriodicSignal] | np.ndarray) -> PeriodicSignal:
    Y = _as_matrix(curves)
    if Y.shape[0] < 1:
        raise ParameterError("need at least one curve")
    return PeriodicSignal(Y.mean(axis=0))


def _best_offsets(Y: np.ndarray, ref: np.ndarray, refine: bool) -> np.ndarray:
    """Shift ``tau_m`` maximizing ``<Y_m(. + tau), ref>`` for every row."""
    N = Y.shape[1]
    # corr[m, s] = sum_x Y_m(x + s/N) ref(x)
    corr = np.fft.irfft(np.fft.rfft(Y, axis=1) * np.conj(np.fft.rfft(ref)), n=N, axis=1)
    best = np.argmax(corr, axis=1)
    offset = best.astype(float)
    if refine:
        rows = np.arange(Y.shape[0])
        left = corr[rows, (best - 1) % N]
        mid = corr[rows, best]
        right = corr[rows, (best + 1) % N]
        denom = left - 2 * mid + right
        with np.errstate(divide="ignore", invalid="ignore"):
            delta = np.where(denom < 0, 0.5 * (left - right) / denom, 0.0)
        offset += np.clip(delta, -0.5, 0.5)
    tau = offset / N
    return tau - np.round(tau)


def procrustean_mean(curves, config: ProcrustesConfig = ProcrustesConfig(), reference=None):
    """Alternate between aligning every curve to the reference and averaging.

    Parameters
    ----------
    curves : array of shape (n, N) or sequence of PeriodicSignal
    config : ProcrustesConfig
    reference : PeriodicSignal or array, optional
        Starting reference.  Defaults to the direct mean.

    Returns
    -------
    (PeriodicSignal, ndarray)
        The final reference and shifts with ``Y_m(x) ~ reference(x - shifts[m])``.
    """
    Y = _as_matrix(curves)
    if Y.shape[0] < 2:
        raise ParameterError("Procrustean mean needs at least two curves")
    if reference is None:
        ref = Y.mean(axis=0)
    else:
        ref = np.asarray(getattr(reference, "samples", reference), dtype=float)
        if ref.shape != (Y.shape[1],):
            raise ParameterError("reference must live on the same grid as the curves")
    taus = np.zeros(Y.shape[0])
    for _ in range(config.i_max):
        taus = _best_offsets(Y, ref, config.refine)
        ref = cyclic_shift_rows(Y, -taus).mean(axis=0)
    return PeriodicSignal(ref), taus
