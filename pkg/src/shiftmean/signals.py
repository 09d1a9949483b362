"""The four benchmark mean patterns.

HeaviSine, Blocks and Bumps follow the WaveLab ``MakeSignal`` formulas.  Wave
is the smooth ``0.5 + 0.2 cos(4 pi x) + 0.1 cos(24 pi x)`` pattern used in the
periodic deconvolution literature.  Samples are taken at ``x_i = i/N`` and, by
default, rescaled to unit L2 norm so noise levels are comparable across signals.
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .fourier import PeriodicSignal, is_power_of_two

__all__ = ["SIGNAL_NAMES", "BLOCKS_POSITIONS", "raw_signal", "test_signal"]

SIGNAL_NAMES = ("Wave", "HeaviSine", "Blocks", "Bumps")

BLOCKS_POSITIONS = np.array([0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
_BLOCKS_HEIGHTS = np.array([4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
_BUMPS_HEIGHTS = np.array([4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
_BUMPS_WIDTHS = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])


def raw_signal(name: str, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if name == "Wave":
        return 0.5 + 0.2 * np.cos(4 * np.pi * t) + 0.1 * np.cos(24 * np.pi * t)
    if name == "HeaviSine":
        return 4 * np.sin(4 * np.pi * t) - np.sign(t - 0.3) - np.sign(0.72 - t)
    if name == "Blocks":
        steps = (1 + np.sign(t[..., None] - BLOCKS_POSITIONS)) / 2
        return steps @ _BLOCKS_HEIGHTS
    if name == "Bumps":
        u = np.abs((t[..., None] - BLOCKS_POSITIONS) / _BUMPS_WIDTHS)
        return (1 + u) ** -4 @ _BUMPS_HEIGHTS
    raise ParameterError(f"unknown signal {name!r}; expected one of {', '.join(SIGNAL_NAMES)}")


def test_signal(name: str, N: int, normalize: bool = True) -> PeriodicSignal:
    if not is_power_of_two(N):
        raise ParameterError(f"grid size must be a power of two, got {N}")
    y = raw_signal(name, np.arange(N) / N)
    if normalize:
        y = y / np.sqrt(np.mean(y**2))
    return PeriodicSignal(y)


test_signal.__test__ = False  # keep pytest from collecting it
