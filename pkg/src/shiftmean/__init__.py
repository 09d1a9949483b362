"""Mean pattern estimation from randomly shifted noisy curves.

Two routes are provided: wavelet deconvolution when the shift density is
known, and shift registration followed by thresholding when it is not.
"""
from .baselines import ProcrustesConfig, cyclic_shift, direct_mean, procrustean_mean
from .densities import Dirac, Laplace, ShiftDensity, TruncatedCosine, UniformCentered, density_from_dict
from .errors import ConjugateSymmetryError, DomainError, NumericalError, ParameterError, ShiftMeanError
from .estimators import (
    EmpiricalGamma,
    LinearFilter,
    ThresholdPolicy,
    estimate_fn1,
    estimate_fn2,
    estimate_noise_variance,
    hard_threshold_estimate,
    spectral_cutoff,
)
from .fourier import CurveCoeffsMatrix, FourierCoeffs, PeriodicSignal, from_fourier, to_fourier
from .meyer import WaveletBasisSpec, WaveletCoeffs, analyze, synthesize
from .registration import DescentConfig, estimate_shifts, frechet_mean, van_trees_bound
from .result import EstimateResult
from .signals import SIGNAL_NAMES, test_signal

__version__ = "0.1.0"

__all__ = [
    "ProcrustesConfig", "cyclic_shift", "direct_mean", "procrustean_mean",
    "Dirac", "Laplace", "ShiftDensity", "TruncatedCosine", "UniformCentered", "density_from_dict",
    "ConjugateSymmetryError", "DomainError", "NumericalError", "ParameterError", "ShiftMeanError",
    "EmpiricalGamma", "LinearFilter", "ThresholdPolicy", "estimate_fn1", "estimate_fn2",
    "estimate_noise_variance", "hard_threshold_estimate", "spectral_cutoff",
    "CurveCoeffsMatrix", "FourierCoeffs", "PeriodicSignal", "from_fourier", "to_fourier",
    "WaveletBasisSpec", "WaveletCoeffs", "analyze", "synthesize",
    "DescentConfig", "estimate_shifts", "frechet_mean", "van_trees_bound",
    "EstimateResult", "SIGNAL_NAMES", "test_signal",
]
