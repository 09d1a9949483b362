"""Simulation of the randomly shifted curves model and Monte Carlo risk studies."""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .baselines import ProcrustesConfig, cyclic_shift_rows, direct_mean, procrustean_mean
from .densities import Dirac, ShiftDensity, density_from_dict
from .errors import NumericalError, ParameterError
from .estimators import (
    ThresholdPolicy,
    estimate_fn1,
    estimate_fn2,
    hard_threshold_estimate,
    spectral_cutoff,
)
from .fourier import PeriodicSignal, curves_to_coeffs, deconvolve, is_power_of_two, sample_mean_coeffs
from .meyer import WaveletBasisSpec
from .registration import DescentConfig, estimate_shifts, frechet_mean
from .signals import SIGNAL_NAMES, test_signal

__all__ = [
    "DEFAULT_ROOT_SNR",
    "EstimatorSpec",
    "ExperimentConfig",
    "EstimatorRisk",
    "RiskReport",
    "RateReport",
    "Dataset",
    "replication_rng",
    "simulate",
    "mise",
    "run_estimator",
    "run_risk_study",
    "rate_study",
    "paper_config",
    "resolve_threads",
]

DEFAULT_ROOT_SNR = 7.0

EstimatorName = Literal["direct", "procrustes", "frechet", "cutoff", "known_g", "fn1", "fn2"]


class EstimatorSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: EstimatorName
    label: Optional[str] = None
    eta: float = Field(1.5, gt=0)
    ell0: int = Field(3, ge=1)
    j0: Optional[int] = Field(3, ge=0)
    j1: Optional[int] = Field(None, ge=0)
    M: Optional[int] = Field(None, ge=0)
    known_g: bool = True
    i_max: int = Field(3, ge=1)
    refine: bool = True

    @property
    def key(self) -> str:
        return self.label or self.name


class ExperimentConfig(BaseModel):
    """One simulation study.  ``noise_sd`` is per sample; ``eps = noise_sd / sqrt(N)``."""

    model_config = ConfigDict(extra="forbid")

    signal: Literal["Wave", "HeaviSine", "Blocks", "Bumps"] = "HeaviSine"
    n: int = Field(200, ge=1)
    N: int = 512
    density: dict = Field(default_factory=lambda: {"kind": "laplace", "scale": 0.1})
    noise_sd: Optional[float] = Field(None, ge=0)
    noise_known: bool = False
    estimators: list[EstimatorSpec] = Field(default_factory=lambda: [EstimatorSpec(name="direct")])
    replications: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)

    @field_validator("N")
    @classmethod
    def _power_of_two(cls, v):
        if not is_power_of_two(v) or v < 8:
            raise ValueError("N must be a power of two >= 8")
        return v

    @field_validator("density")
    @classmethod
    def _valid_density(cls, v):
        density_from_dict(v)
        return v

    @model_validator(mode="after")
    def _unique_labels(self):
        keys = [e.key for e in self.estimators]
        if len(set(keys)) != len(keys):
            raise ValueError(f"estimator labels must be unique, got {keys}")
        return self

    @property
    def shift_density(self) -> ShiftDensity:
        return density_from_dict(self.density)

    @property
    def effective_noise_sd(self) -> float:
        # signals are unit-norm, so root-SNR = 1 / noise_sd
        return 1.0 / DEFAULT_ROOT_SNR if self.noise_sd is None else self.noise_sd

    @property
    def eps(self) -> float:
        return self.effective_noise_sd / math.sqrt(self.N)


class EstimatorRisk(BaseModel):
    label: str
    name: str
    mean_mise: Optional[float]
    std_error: Optional[float]
    replications: int
    failures: int = 0


class RiskReport(BaseModel):
    config: ExperimentConfig
    root_snr: Optional[float]
    eps: float
    signal_normalization: str = "unit L2 norm"
    estimators: list[EstimatorRisk]

    def risk(self, label: str) -> EstimatorRisk:
        for e in self.estimators:
            if e.label == label:
                return e
        raise KeyError(label)


class RateReport(BaseModel):
    n_grid: list[int]
    mean_mise: list[float]
    slope: float
    intercept: float
    theoretical_slope: Optional[float] = None
    s: Optional[float] = None
    nu: Optional[float] = None
    estimator: str


@dataclass(frozen=True, eq=False)
class Dataset:
    curves: np.ndarray  # (n, N)
    taus: np.ndarray
    f: PeriodicSignal
    noise_sd: float

    @property
    def eps(self) -> float:
        return self.noise_sd / math.sqrt(self.curves.shape[1])


def replication_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one replication, derived by hashing ``(seed, index)``."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def simulate(config: ExperimentConfig, replication_index: int = 0) -> Dataset:
    """``Y_m = f(. - tau_m) + noise_sd * z_m`` on the ``N``-point grid."""
    rng = replication_rng(config.seed, replication_index)
    f = test_signal(config.signal, config.N)
    taus = np.asarray(config.shift_density.sample(rng, config.n), dtype=float)
    noise_sd = config.effective_noise_sd
    curves = cyclic_shift_rows(f.samples, taus)
    if noise_sd > 0:
        curves = curves + noise_sd * rng.standard_normal((config.n, config.N))
    return Dataset(curves, taus, f, noise_sd)


def mise(f_hat: PeriodicSignal, f_true: PeriodicSignal) -> float:
    """Integrated squared error on the grid, ``1/N sum (f_hat - f)^2``."""
    if f_hat.grid_size != f_true.grid_size:
        raise ParameterError(f"grid mismatch: {f_hat.grid_size} vs {f_true.grid_size}")
    return float(np.mean((f_hat.samples - f_true.samples) ** 2))


class _ShiftCache:
    def __init__(self, coeffs):
        self.coeffs = coeffs
        self._taus = {}

    def get(self, ell0: int):
        if ell0 not in self._taus:
            self._taus[ell0], _ = estimate_shifts(self.coeffs, DescentConfig(ell0=ell0))
        return self._taus[ell0]


def run_estimator(spec: EstimatorSpec, data: Dataset, config: ExperimentConfig, cache=None) -> PeriodicSignal:
    N = data.curves.shape[1]
    if spec.name == "direct":
        return direct_mean(data.curves)
    if spec.name == "procrustes":
        return procrustean_mean(data.curves, ProcrustesConfig(spec.i_max, spec.refine))[0]
    coeffs = curves_to_coeffs(data.curves)
    cache = cache or _ShiftCache(coeffs)
    eps = data.eps if config.noise_known else None
    policy = ThresholdPolicy(eta=spec.eta, j0=spec.j0, j1=spec.j1)
    basis = None
    if spec.j0 is not None and spec.j1 is not None:
        basis = WaveletBasisSpec(spec.j0, spec.j1)
    density = config.shift_density
    if spec.name == "frechet":
        return frechet_mean(coeffs, cache.get(spec.ell0), spec.ell0, N).f_hat
    if spec.name == "cutoff":
        if spec.M is None:
            raise ParameterError("estimators[].M is required for the cutoff estimator")
        theta, _ = deconvolve(sample_mean_coeffs(coeffs), density if spec.known_g else Dirac())
        return spectral_cutoff(theta, spec.M, N).f_hat
    if spec.name == "known_g":
        return hard_threshold_estimate(coeffs, density, eps, policy, basis, N).f_hat
    if spec.name == "fn1":
        return estimate_fn1(coeffs, cache.get(spec.ell0), eps, policy, basis, spec.ell0, N).f_hat
    if spec.name == "fn2":
        return estimate_fn2(coeffs, cache.get(spec.ell0), eps, policy, basis, spec.ell0, N).f_hat
    raise ParameterError(f"unknown estimator {spec.name!r}")


def _one_replication(config: ExperimentConfig, index: int) -> list:
    data = simulate(config, index)
    cache = None
    if any(e.name in ("frechet", "fn1", "fn2") for e in config.estimators):
        cache = _ShiftCache(curves_to_coeffs(data.curves))
    out = []
    for spec in config.estimators:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                out.append(mise(run_estimator(spec, data, config, cache), data.f))
        except (NumericalError, FloatingPointError, np.linalg.LinAlgError):
            out.append(None)
    return out


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("SHIFTMEAN_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def _parallel_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_risk_study(config: ExperimentConfig, threads: int | None = None) -> RiskReport:
    """Mean MISE and Monte Carlo standard error for every configured estimator."""
    threads = resolve_threads(threads)
    results = _parallel_map(lambda i: _one_replication(config, i), range(config.replications), threads)
    risks = []
    for col, spec in enumerate(config.estimators):
        vals = np.array([r[col] for r in results if r[col] is not None], dtype=float)
        failures = config.replications - vals.size
        if failures:
            warnings.warn(f"{spec.key}: {failures} replication(s) failed and were excluded", stacklevel=2)
        mean = float(vals.mean()) if vals.size else None
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else None
        risks.append(EstimatorRisk(label=spec.key, name=spec.name, mean_mise=mean, std_error=se,
                                   replications=int(vals.size), failures=failures))
    noise = config.effective_noise_sd
    return RiskReport(
        config=config,
        root_snr=(1.0 / noise if noise > 0 else None),
        eps=config.eps,
        estimators=risks,
    )


def rate_study(
    base: ExperimentConfig,
    n_grid,
    s: float | None = None,
    nu: float | None = None,
    estimator: EstimatorSpec | None = None,
    threads: int | None = None,
) -> RateReport:
    """Least-squares slope of log(mean MISE) against log(n)."""
    n_grid = [int(v) for v in n_grid]
    if len(n_grid) < 3 or max(n_grid) < 10 * min(n_grid):
        raise ParameterError("n_grid needs at least 3 points spanning a decade")
    estimator = estimator or EstimatorSpec(name="known_g")
    means = []
    for n in n_grid:
        cfg = base.model_copy(update={"n": n, "estimators": [estimator]})
        means.append(run_risk_study(cfg, threads).estimators[0].mean_mise)
    slope, intercept = np.polyfit(np.log(n_grid), np.log(means), 1)
    theory = None
    if s is not None and nu is not None:
        theory = -2 * s / (2 * s + 2 * nu + 1)
    return RateReport(n_grid=n_grid, mean_mise=[float(m) for m in means], slope=float(slope),
                      intercept=float(intercept), theoretical_slope=theory, s=s, nu=nu,
                      estimator=estimator.key)


PAPER_ESTIMATORS = ("direct", "fn1", "fn2", "procrustes")


def paper_config(signal: str = "HeaviSine", **overrides) -> ExperimentConfig:
    """The four-estimator comparison: n=200, Laplace(0.1) shifts, l0=3, eta=1.5, j0=3, j1=7."""
    if signal not in SIGNAL_NAMES:
        raise ParameterError(f"unknown signal {signal!r}")
    est = [EstimatorSpec(name=name, eta=1.5, ell0=3, j0=3, j1=7) for name in PAPER_ESTIMATORS]
    params = dict(signal=signal, n=200, N=512, density={"kind": "laplace", "scale": 0.1},
                  estimators=est, replications=50, seed=2010)
    params.update(overrides)
    return ExperimentConfig(**params)
