from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fourier import FourierCoeffs, PeriodicSignal
from .meyer import WaveletCoeffs

__all__ = ["EstimateResult"]

# stable field names of the exported metadata document
METADATA_FIELDS = ("estimator", "n", "eps_hat", "eta", "j0", "j1", "ell0", "zeroed_freqs", "thresholds")


@dataclass(frozen=True, eq=False)
class EstimateResult:
    """An estimate of the mean pattern with everything needed to audit it.

    ``f_hat`` is always the synthesis of ``theta_hat``; for wavelet estimators
    ``theta_hat`` is in turn the synthesis of the kept coefficients in ``wavelet``.
    """

    f_hat: PeriodicSignal
    theta_hat: FourierCoeffs
    wavelet: WaveletCoeffs | None = None
    kept: tuple | None = None
    meta: dict = field(default_factory=dict)

    @property
    def shifts(self):
        """Shift estimates used by the estimator, if any."""
        return self.meta.get("_shifts")

    def metadata(self) -> dict:
        out = {key: self.meta.get(key) for key in METADATA_FIELDS}
        out["zeroed_freqs"] = [int(v) for v in self.meta.get("zeroed_freqs", [])]
        out["thresholds"] = [
            {"j": int(j), "value": (None if not np.isfinite(v) else float(v))}
            for j, v in self.meta.get("thresholds", [])
        ]
        if self.kept is not None:
            out["kept_counts"] = [int(np.sum(k)) for k in self.kept]
        for key, value in self.meta.items():
            if key not in out and not key.startswith("_"):
                out[key] = value
        return out
