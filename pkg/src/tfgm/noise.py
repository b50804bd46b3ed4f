"""Robust noise level from the STFT and per-method edge thresholds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tfr import TFR

MAD_SCALE = 0.6745
CRITERIA = ("product", "min")
TARGETS = ("stft-modulus", "sst2-modulus", "smoothed-stft-modulus")
DEFAULT_E_QUANTILE = 0.80
GAMMA_CONVENTIONS = ("real", "complex")


@dataclass(frozen=True)
class ThresholdSpec:
    criterion: str
    tau: float
    target: str

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if not self.tau >= 0:
            raise ValueError("tau must be non-negative")


def estimate_gamma(F: TFR | np.ndarray, convention: str = "real") -> float:
    """Robust noise level from ``median(|Re F|) / 0.6745`` over all entries.

    Parameters
    ----------
    F : TFR or ndarray
        STFT coefficients.
    convention : {"real", "complex"}
        ``"real"`` estimates the standard deviation of ``Re F``.
        ``"complex"`` multiplies by ``sqrt(2)``, giving the standard deviation
        of the complex coefficient (``sqrt(E|F|^2)``).
    """
    if convention not in GAMMA_CONVENTIONS:
        raise ValueError(f"unknown gamma convention {convention!r}")
    coeffs = F.coeffs if isinstance(F, TFR) else np.asarray(F)
    if coeffs.size == 0:
        raise ValueError("empty representation")
    scale = np.sqrt(2.0) if convention == "complex" else 1.0
    return float(scale * np.median(np.abs(coeffs.real)) / MAD_SCALE)


def method_threshold(method: str, gamma: float, sigma: float | None = None,
                     e_quantile: float | None = None,
                     smoothed: np.ndarray | None = None) -> ThresholdSpec:
    """Edge criterion and threshold for one of the preset methods A-E.

    Method E thresholds the smoothed modulus at its ``e_quantile`` quantile,
    so the smoothed matrix must be supplied.
    """
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if method == "A":
        return ThresholdSpec("product", 9.0 * gamma**2, "stft-modulus")
    if method == "B":
        return ThresholdSpec("min", 3.0 * gamma, "stft-modulus")
    if method in ("C", "D"):
        if sigma is None or not sigma > 0:
            raise ValueError(f"method {method} needs a positive sigma")
        if method == "C":
            return ThresholdSpec("product", 9.0 * gamma**2 / sigma**2, "sst2-modulus")
        return ThresholdSpec("min", 3.0 * gamma / sigma, "sst2-modulus")
    if method == "E":
        q = DEFAULT_E_QUANTILE if e_quantile is None else e_quantile
        if not 0 <= q <= 1:
            raise ValueError("e_quantile must lie in [0, 1]")
        if gamma == 0:
            tau = 0.0
        elif smoothed is None:
            raise ValueError("method E needs the smoothed modulus")
        else:
            tau = float(np.quantile(smoothed, q))
        return ThresholdSpec("min", tau, "smoothed-stft-modulus")
    raise ValueError(f"unknown method {method!r}")
