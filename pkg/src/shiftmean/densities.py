"""Shift densities and their Fourier eigenvalues.

Each density exposes ``gamma(l) = E exp(-2 i pi l tau)``, a sampler, the
periodized density ``G(x) = sum_k g(x + k)``, the Fisher information of the
location family, the degree of ill-posedness ``nu`` and the variance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "ShiftDensity",
    "Dirac",
    "UniformCentered",
    "Laplace",
    "TruncatedCosine",
    "density_from_dict",
    "periodized_density",
]

_TAIL_MASS = 1e-12


class ShiftDensity:
    kind: ClassVar[str] = ""
    nu: ClassVar[float] = 0.0
    symmetric: ClassVar[bool] = True

    def gamma(self, ell):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def fisher_info(self) -> float:
        raise DomainError(f"Fisher information is not defined for the {self.kind} density")

    @property
    def sigma_g_sq(self) -> float:
        raise NotImplementedError

    def support_half_width(self) -> float:
        """Half-width beyond which the remaining mass is below 1e-12."""
        raise NotImplementedError

    def periodized(self, x):
        x = np.asarray(x, dtype=float)
        K = int(math.ceil(self.support_half_width())) + 1
        ks = np.arange(-K, K + 1).reshape((-1,) + (1,) * x.ndim)
        return self.pdf(x[None, ...] + ks).sum(axis=0)

    def to_dict(self) -> dict:
        raise NotImplementedError


def periodized_density(density: ShiftDensity, x):
    return density.periodized(x)


@dataclass(frozen=True)
class Dirac(ShiftDensity):
    """No shifts at all."""

    kind: ClassVar[str] = "dirac"
    nu: ClassVar[float] = 0.0

    def gamma(self, ell):
        return np.ones_like(np.asarray(ell, dtype=float), dtype=complex) if np.ndim(ell) else 1.0 + 0j

    def pdf(self, x):
        raise DomainError("the Dirac shift distribution has no density")

    def periodized(self, x):
        raise DomainError("the Dirac shift distribution has no density")

    def sample(self, rng, size=None):
        return np.zeros(size) if size is not None else 0.0

    @property
    def sigma_g_sq(self) -> float:
        return 0.0

    def support_half_width(self) -> float:
        return 0.0

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class UniformCentered(ShiftDensity):
    half_width: float = 0.25

    kind: ClassVar[str] = "uniform"
    nu: ClassVar[float] = 1.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ParameterError("uniform half_width must be positive")

    def gamma(self, ell):
        u = 2.0 * np.asarray(ell, dtype=float) * self.half_width
        # sin(pi u) vanishes exactly at nonzero integers; np.sinc leaves ~1e-17 there
        out = np.where((u != 0) & (np.abs(u - np.round(u)) < 1e-12), 0.0, np.sinc(u)).astype(complex)
        return out if np.ndim(ell) else complex(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= self.half_width, 0.5 / self.half_width, 0.0)

    def sample(self, rng, size=None):
        return rng.uniform(-self.half_width, self.half_width, size)

    @property
    def sigma_g_sq(self) -> float:
        return self.half_width**2 / 3.0

    def support_half_width(self) -> float:
        return self.half_width

    def to_dict(self) -> dict:
        return {"kind": self.kind, "half_width": self.half_width}


@dataclass(frozen=True)
class Laplace(ShiftDensity):
    """``g(x) = exp(-sqrt(2)|x|/sigma) / (sqrt(2) sigma)``, variance ``sigma**2``.

    With ``truncate=a`` the density is restricted to ``[-a, a]`` and renormalized.
    """

    scale: float = 0.1
    truncate: float | None = None

    kind: ClassVar[str] = "laplace"

    def __post_init__(self):
        if not self.scale > 0:
            raise ParameterError("laplace scale must be positive")
        if self.truncate is not None and not self.truncate > 0:
            raise ParameterError("laplace truncate must be positive")

    @property
    def b(self) -> float:
        return self.scale / math.sqrt(2.0)

    @property
    def _mass(self) -> float:
        if self.truncate is None:
            return 1.0
        return -math.expm1(-self.truncate / self.b)

    @property
    def nu(self) -> float:  # type: ignore[override]
        # truncation creates jumps at the boundary, eigenvalues then decay like 1/l
        return 2.0 if self.truncate is None else 1.0

    def gamma(self, ell):
        ell_a = np.asarray(ell, dtype=float)
        w = 2.0 * np.pi * ell_a
        if self.truncate is None:
            out = 1.0 / (1.0 + 2.0 * self.scale**2 * np.pi**2 * ell_a**2)
        else:
            p, a = 1.0 / self.b, self.truncate
            half = (p - np.exp(-p * a) * (p * np.cos(w * a) - w * np.sin(w * a))) / (p**2 + w**2)
            out = half / self.b / self._mass
        out = np.asarray(out, dtype=complex)
        return out if np.ndim(ell) else complex(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        g = np.exp(-np.abs(x) / self.b) / (2.0 * self.b)
        if self.truncate is not None:
            g = np.where(np.abs(x) <= self.truncate, g / self._mass, 0.0)
        return g

    def sample(self, rng, size=None):
        if self.truncate is None:
            return rng.laplace(0.0, self.b, size)
        want = 1 if size is None else int(np.prod(size))
        out = np.empty(0)
        while out.size < want:
            draw = rng.laplace(0.0, self.b, max(2 * (want - out.size), 16))
            out = np.concatenate([out, draw[np.abs(draw) <= self.truncate]])
        out = out[:want]
        return float(out[0]) if size is None else out.reshape(size)

    @property
    def fisher_info(self) -> float:
        # score is +-1/b almost everywhere, truncated or not
        return 1.0 / self.b**2

    @property
    def sigma_g_sq(self) -> float:
        if self.truncate is None:
            return self.scale**2
        t = self.truncate / self.b
        return self.b**2 * (2.0 - math.exp(-t) * (t * t + 2 * t + 2)) / self._mass

    def support_half_width(self) -> float:
        if self.truncate is not None:
            return self.truncate
        return self.b * math.log(1.0 / _TAIL_MASS)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "scale": self.scale}
        if self.truncate is not None:
            d["truncate"] = self.truncate
        return d


@dataclass(frozen=True)
class TruncatedCosine(ShiftDensity):
    """Raised cosine ``g(x) = (1 + cos(pi x / a)) / (2a)`` on ``[-a, a]``.

    Vanishes with its derivative at the boundary, so the Van Trees bound applies.
    """

    half_width: float = 0.25

    kind: ClassVar[str] = "cosine"
    nu: ClassVar[float] = 3.0

    def __post_init__(self):
        if not self.half_width > 0:
            raise ParameterError("cosine half_width must be positive")

    def gamma(self, ell):
        u = 2.0 * np.asarray(ell, dtype=float) * self.half_width  # (2 pi l a) / pi
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.sinc(u) / (1.0 - u**2)
        out = np.where(np.isclose(np.abs(u), 1.0, rtol=0, atol=1e-12), 0.5, out)
        out = np.asarray(out, dtype=complex)
        return out if np.ndim(ell) else complex(out)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a = self.half_width
        return np.where(np.abs(x) <= a, (1.0 + np.cos(np.pi * x / a)) / (2 * a), 0.0)

    def sample(self, rng, size=None):
        want = 1 if size is None else int(np.prod(size))
        a = self.half_width
        out = np.empty(0)
        while out.size < want:
            m = max(3 * (want - out.size), 16)
            x = rng.uniform(-a, a, m)
            u = rng.uniform(0.0, 1.0, m)
            out = np.concatenate([out, x[u <= np.cos(np.pi * x / (2 * a)) ** 2]])
        out = out[:want]
        return float(out[0]) if size is None else out.reshape(size)

    @property
    def fisher_info(self) -> float:
        return (np.pi / self.half_width) ** 2

    @property
    def sigma_g_sq(self) -> float:
        return self.half_width**2 * (1.0 / 3.0 - 2.0 / np.pi**2)

    def support_half_width(self) -> float:
        return self.half_width

    def to_dict(self) -> dict:
        return {"kind": self.kind, "half_width": self.half_width}


_KINDS = {cls.kind: cls for cls in (Dirac, UniformCentered, Laplace, TruncatedCosine)}


def density_from_dict(d: dict) -> ShiftDensity:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind not in _KINDS:
        raise ParameterError(f"density.kind must be one of {sorted(_KINDS)}, got {kind!r}")
    try:
        return _KINDS[kind](**d)
    except TypeError as exc:
        raise ParameterError(f"density: {exc}") from None
