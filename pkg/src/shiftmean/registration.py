"""Shift estimation by minimizing the Fréchet-mean criterion.

For curves with Fourier coefficients ``c_{m,l}`` and candidate shifts ``tau``::

    M_n(tau) = 1/n sum_m sum_{|l| <= l0} | c_{m,l} e^{2 i pi l tau_m} - mean_q c_{q,l} e^{2 i pi l tau_q} |^2

``M_n`` is invariant under a common shift of every ``tau_m``; the optimizer
works on the zero-sum slice ``tau_1 = -sum_{m >= 2} tau_m``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .fourier import CurveCoeffsMatrix, FourierCoeffs, from_fourier, grid_for
from .result import EstimateResult

__all__ = [
    "DescentConfig",
    "DescentTrace",
    "criterion_mn",
    "gradient_mn",
    "estimate_shifts",
    "frechet_mean",
    "van_trees_bound",
    "shift_error",
]


@dataclass(frozen=True)
class DescentConfig:
    ell0: int = 3
    kappa: float = 2.0
    rho: float = 1e-6
    max_iters: int = 500
    max_shrinks: int = 200

    def __post_init__(self):
        if self.ell0 < 1:
            raise ParameterError("ell0 must be >= 1")
        if not self.kappa > 1:
            raise ParameterError("kappa must be > 1")
        if not self.rho > 0:
            raise ParameterError("rho must be > 0")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")


@dataclass
class DescentTrace:
    values: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    taus: np.ndarray | None = None
    reason: str = ""
    out_of_range: int = 0  # shifts with |tau| > 1/4 at termination

    @property
    def iterations(self) -> int:
        return len(self.values) - 1

    def rows(self):
        for p, (v, s, g) in enumerate(zip(self.values, self.steps, self.grad_norms)):
            yield p, v, s, g


def _restrict(curves: CurveCoeffsMatrix, taus, ell0: int):
    if ell0 > curves.max_freq or ell0 < 0:
        raise ParameterError(f"ell0={ell0} outside 0..{curves.max_freq}")
    taus = np.asarray(taus, dtype=float)
    if taus.shape != (curves.n,):
        raise ParameterError(f"expected {curves.n} shifts, got shape {taus.shape}")
    c = curves.truncate(ell0).rows
    ell = np.arange(-ell0, ell0 + 1)
    return c, ell, taus


def _aligned(c, ell, taus):
    A = c * np.exp(2j * np.pi * np.outer(taus, ell))
    return A, A.mean(axis=0)


def criterion_mn(curves: CurveCoeffsMatrix, taus, ell0: int) -> float:
    c, ell, taus = _restrict(curves, taus, ell0)
    A, Abar = _aligned(c, ell, taus)
    return float(np.sum(np.abs(A - Abar) ** 2) / curves.n)


def gradient_mn(curves: CurveCoeffsMatrix, taus, ell0: int) -> np.ndarray:
    c, ell, taus = _restrict(curves, taus, ell0)
    A, Abar = _aligned(c, ell, taus)
    return -(2.0 / curves.n) * np.real(2j * np.pi * ell * A * np.conj(Abar)).sum(axis=1)


def _project(taus: np.ndarray) -> np.ndarray:
    out = taus.copy()
    # keep tau_2..tau_n in [-1/2, 1/2), then restore the zero-sum constraint
    out[1:] = out[1:] - np.round(out[1:])
    out[0] = -out[1:].sum()
    return out


def estimate_shifts(curves: CurveCoeffsMatrix, config: DescentConfig = DescentConfig()):
    """Projected gradient descent on ``M_n`` started from ``tau = 0``.

    The step starts at ``1/||grad M_n(0)||``, is divided by ``kappa`` until the
    criterion decreases, and is doubled (capped at its initial value) after each
    accepted step.  Iterations stop once
    ``M(p) - M(p+1) < rho (M(1) - M(p+1))``.  Returns ``(taus, trace)``.
    """
    n = curves.n
    if n < 2:
        raise ParameterError("shift estimation needs at least two curves")
    ell0 = config.ell0
    if ell0 > curves.max_freq:
        raise ParameterError(f"ell0={ell0} exceeds the available frequencies ({curves.max_freq})")
    c1 = curves.truncate(1).rows[:, 2]
    if np.sqrt(np.mean(np.abs(c1) ** 2)) <= 1e-8:
        warnings.warn("first Fourier coefficient is ~0: shifts are not identifiable", stacklevel=2)

    crit = lambda t: criterion_mn(curves, t, ell0)  # noqa: E731
    grad = lambda t: gradient_mn(curves, t, ell0)  # noqa: E731

    tau = np.zeros(n)
    trace = DescentTrace()
    M_prev = crit(tau)
    g = grad(tau)
    gnorm = float(np.linalg.norm(g))
    ell = np.arange(-ell0, ell0 + 1)
    scale = float(np.sum((2 * np.pi * ell) ** 2 * np.abs(curves.truncate(ell0).rows) ** 2) / n)
    trace.values.append(M_prev)
    trace.steps.append(0.0)
    trace.grad_norms.append(gnorm)
    if gnorm <= 1e-12 * max(scale, 1e-300):
        trace.taus, trace.reason = tau, "stationary start"
        return tau, trace

    delta0 = 1.0 / gnorm
    delta = delta0
    M_first = None
    trace.reason = "max_iters"
    for _ in range(config.max_iters):
        for _shrink in range(config.max_shrinks):
            new = _project(tau - delta * g)
            M_new = crit(new)
            if M_new <= M_prev:
                break
            delta /= config.kappa
        else:
            trace.reason = "step underflow"
            break
        tau = new
        g = grad(tau)
        trace.values.append(M_new)
        trace.steps.append(delta)
        trace.grad_norms.append(float(np.linalg.norm(g)))
        if M_first is None:
            M_first = M_new
        elif not (M_prev - M_new >= config.rho * (M_first - M_new)):
            M_prev = M_new
            trace.reason = "converged"
            break
        M_prev = M_new
        delta = min(delta * 2.0, delta0)
    trace.taus = tau
    trace.out_of_range = int(np.sum(np.abs(tau) > 0.25))
    return tau, trace


def shift_error(taus_hat, taus_true, center: bool = True) -> float:
    """``1/n sum (tau_hat_m - (tau*_m - mean tau*))^2`` against the centered truth.

    With ``center=False`` the raw truth ``tau*`` is used, which is the quantity
    bounded by :func:`van_trees_bound`.  Differences are wrapped to ``[-1/2, 1/2)``.
    """
    taus_true = np.asarray(taus_true, dtype=float)
    if center:
        taus_true = taus_true - taus_true.mean()
    d = np.asarray(taus_hat, dtype=float) - taus_true
    d = d - np.round(d)
    return float(np.mean(d**2))


def frechet_mean(curves: CurveCoeffsMatrix, taus, ell0: int, N: int | None = None) -> EstimateResult:
    """Realigned average of the curves truncated to ``|l| <= ell0``."""
    c, ell, taus = _restrict(curves, taus, ell0)
    _, theta = _aligned(c, ell, taus)
    N = grid_for(curves.max_freq) if N is None else N
    coeffs = FourierCoeffs(theta)
    return EstimateResult(
        from_fourier(coeffs, N),
        coeffs,
        meta={"estimator": "frechet", "n": curves.n, "ell0": ell0},
    )


def van_trees_bound(theta: FourierCoeffs, eps: float, density, ell0: int | None = None) -> float:
    """Lower bound on ``E 1/n sum (tau_hat_m - tau*_m)^2`` at noise level ``eps``.

    With ``ell0`` the spectral energy is restricted to ``|l| <= ell0``.
    """
    fisher = density.fisher_info
    coeffs = theta.truncate(min(ell0, theta.max_freq)) if ell0 is not None else theta
    energy = float(np.sum((2 * np.pi * coeffs.freqs) ** 2 * np.abs(coeffs.coeffs) ** 2))
    return eps**2 / (energy + eps**2 * fisher)
