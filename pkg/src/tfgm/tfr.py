"""Discrete STFT (hop 1), reassignment operators and synchrosqueezing.

The STFT follows the modulation convention

    F[m, n] = sum_u x[u] g[u - n] exp(-2j pi m (u - n) / M)

so that summing a column over all ``M`` bins gives ``M * x[n] * g[0]``.
Row ``m`` is frequency bin ``m`` (cycles/sample ``m / M``), column ``n`` is
time sample ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .signals import Signal

INVALID = -1

KINDS = ("stft", "sst1", "sst2", "smoothed-stft-modulus")


@dataclass(frozen=True)
class Window:
    """Symmetric window sampled on offsets ``-half .. half``."""

    taps: np.ndarray
    sigma: float

    @property
    def half(self) -> int:
        return (self.taps.size - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.half, self.half + 1)

    @property
    def center_value(self) -> float:
        return float(self.taps[self.half])

    @property
    def support(self) -> int:
        return self.taps.size

    def __call__(self, u):
        """Window value at integer offset(s) ``u``; zero outside the support."""
        u = np.asarray(u)
        out = np.zeros(u.shape)
        inside = np.abs(u) <= self.half
        out[inside] = self.taps[u[inside] + self.half]
        return out


@dataclass(frozen=True)
class TFR:
    coeffs: np.ndarray
    kind: str
    window: Window
    dt: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown TFR kind {self.kind!r}")
        if self.coeffs.ndim != 2:
            raise ValueError("coefficients must form a matrix")
        if self.kind == "smoothed-stft-modulus" and (
            np.iscomplexobj(self.coeffs) or np.any(self.coeffs < 0)
        ):
            raise ValueError("a smoothed modulus must be real and non-negative")

    @property
    def n_bins(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_times(self) -> int:
        return self.coeffs.shape[1]

    @property
    def half_bins(self) -> int:
        """Number of rows ``0 .. M//2`` used for masking real signals."""
        return self.n_bins // 2 + 1

    def modulus(self, half: bool = True) -> np.ndarray:
        a = np.abs(self.coeffs)
        return a[: self.half_bins] if half else a


DEFAULT_TRUNCATION = 7.5  # tail exp(-7.5**2/2) < 1e-12


def gaussian_window(sigma: float, truncation: float = DEFAULT_TRUNCATION) -> Window:
    """``g[u] = exp(-u**2 / (2 sigma**2))`` for ``|u| <= truncation * sigma``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if truncation < 4:
        raise ValueError("truncation must be at least 4 sigma")
    half = int(np.floor(truncation * sigma))
    u = np.arange(-half, half + 1)
    return Window(np.exp(-(u**2) / (2.0 * sigma**2)), float(sigma))


def window_for(sigma: float, M: int) -> Window:
    """Gaussian window with the default truncation, shortened to fit ``M`` bins if needed."""
    truncation = min(DEFAULT_TRUNCATION, (M - 1) / (2.0 * sigma))
    return gaussian_window(sigma, max(truncation, 4.0))


def _window_family(g: Window) -> dict[str, np.ndarray]:
    """Gaussian window and the derived windows used by the reassignment operators."""
    u = g.offsets.astype(float)
    s2 = g.sigma**2
    taps = g.taps
    dg = -u / s2 * taps
    return {
        "g": taps,
        "dg": dg,
        "d2g": (u**2 / s2**2 - 1.0 / s2) * taps,
        "tg": u * taps,
        "tdg": u * dg,
    }


def _stft_taps(x: np.ndarray, taps: np.ndarray, M: int) -> np.ndarray:
    half = (taps.size - 1) // 2
    if taps.size > M:
        raise ValueError(f"window support {taps.size} exceeds M={M}; folding would alias")
    N = x.size
    padded = np.concatenate([np.zeros(half), x, np.zeros(half)])
    # frames[n, k + half] = x[n + k] g[k]
    frames = np.lib.stride_tricks.sliding_window_view(padded, taps.size) * taps
    folded = np.zeros((N, M), dtype=float)
    cols = np.arange(-half, half + 1) % M
    folded[:, cols] = frames
    return np.fft.fft(folded, axis=1).T


def stft(x: Signal, g: Window, M: int) -> TFR:
    """Hop-1 STFT with ``M`` frequency bins; returns an ``M x N`` complex TFR."""
    if M < 2:
        raise ValueError("M must be at least 2")
    return TFR(_stft_taps(x.samples, g.taps, M), "stft", g, x.dt)


def _reassign_bins(m_signed: np.ndarray, est: np.ndarray, M: int, valid: np.ndarray) -> np.ndarray:
    """Round signed reassigned bins; drop those leaving their half of the spectrum."""
    target = np.full(est.shape, INVALID, dtype=np.int64)
    ok = valid & np.isfinite(est)
    r = np.zeros(est.shape, dtype=np.int64)
    r[ok] = np.rint(est[ok]).astype(np.int64)
    pos = m_signed >= 0
    in_half = np.where(pos, (r >= 0) & (r <= M // 2), (r <= 0) & (r >= -(M // 2)))
    ok &= in_half
    target[ok] = r[ok] % M
    return target


def reassignment_operator(x: Signal, g: Window, M: int, order: int = 1,
                          fallback_tol: float = 1e-10) -> np.ndarray:
    """Integer map ``omega[m, n]`` of reassigned frequency bins.

    Order 1 uses the derivative-window STFT. Order 2 adds the chirp-rate
    correction built from the second-derivative and time-weighted windows,
    falling back to order 1 where its denominator is below
    ``fallback_tol * max_m |F[m, n]|**2``. Coefficients with negligible
    modulus, and reassignments that leave their half of the spectrum, are
    marked ``INVALID``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    fam = _window_family(g)
    xs = x.samples
    F = _stft_taps(xs, fam["g"], M)
    Fd = _stft_taps(xs, fam["dg"], M)
    mod = np.abs(F)
    peak = mod.max()
    valid = mod > np.finfo(float).eps * peak if peak > 0 else np.zeros(F.shape, bool)

    m_signed = np.arange(M)
    m_signed = np.where(m_signed <= M // 2, m_signed, m_signed - M)[:, None] * np.ones((1, F.shape[1]))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio_d = np.where(valid, Fd / np.where(valid, F, 1.0), 0.0)
        first = m_signed - M * ratio_d.imag / (2 * np.pi)
        if order == 1:
            return _reassign_bins(m_signed, first, M, valid)

        Fdd = _stft_taps(xs, fam["d2g"], M)
        Ft = _stft_taps(xs, fam["tg"], M)
        Ftd = _stft_taps(xs, fam["tdg"], M)
        denom = Ft * Fd - Ftd * F
        colmax = mod.max(axis=0, keepdims=True)
        use2 = valid & (np.abs(denom) > fallback_tol * colmax**2)
        safe = np.where(use2, denom, 1.0)
        # complex chirp rate (cycles/sample^2)
        rate = 1j * (Fd**2 - Fdd * F) / (2 * np.pi * safe)
        shift = np.where(use2, rate * Ft / np.where(valid, F, 1.0), 0.0)
        second = first - M * shift.real
    return _reassign_bins(m_signed, second, M, valid)


def synchrosqueeze(F: TFR, omega: np.ndarray) -> TFR:
    """Move every coefficient ``F[v, n]`` to row ``omega[v, n]`` of column ``n``."""
    if omega.shape != F.coeffs.shape:
        raise ValueError("reassignment map does not match the TFR")
    M, N = F.coeffs.shape
    keep = (omega >= 0) & (omega < M)
    cols = np.broadcast_to(np.arange(N), (M, N))
    S = np.zeros((M, N), dtype=complex)
    np.add.at(S, (omega[keep], cols[keep]), F.coeffs[keep])
    return TFR(S, "sst1", F.window, F.dt)


def sst(x: Signal, g: Window, M: int, order: int = 2) -> TFR:
    """Synchrosqueezed STFT of the given order."""
    F = stft(x, g, M)
    S = synchrosqueeze(F, reassignment_operator(x, g, M, order))
    return TFR(S.coeffs, f"sst{order}", g, x.dt)


def smooth_modulus(A: np.ndarray, kernel_sigma: float) -> np.ndarray:
    """Isotropic 2-D Gaussian blur with reflective boundaries."""
    if not kernel_sigma > 0:
        raise ValueError("kernel_sigma must be positive")
    return ndimage.gaussian_filter(np.asarray(A, dtype=float), kernel_sigma, mode="reflect")
