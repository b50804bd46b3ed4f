"""Synthetic test signals, noise injection and signal-level metrics.

Frequencies are in Hz and times in seconds; with ``dt=1`` they read as
cycles/sample and samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import eval_hermite


@dataclass(frozen=True)
class Signal:
    """Uniformly sampled real signal."""

    samples: np.ndarray
    dt: float = 1.0
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        if x.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if x.size < 1:
            raise ValueError("a signal needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dt

    @property
    def energy(self) -> float:
        return float(np.dot(self.samples, self.samples))

    def with_samples(self, samples, name=None) -> "Signal":
        return Signal(samples, self.dt, self.name if name is None else name)

    def __add__(self, other: "Signal") -> "Signal":
        if len(self) != len(other):
            raise ValueError("cannot add signals of different lengths")
        return Signal(self.samples + other.samples, self.dt, self.name)


def _check_nyquist(dt: float, *freqs: float) -> None:
    nyq = 0.5 / dt
    for f in freqs:
        if not 0 <= f < nyq:
            raise ValueError(f"frequency {f} outside [0, {nyq}) (Nyquist)")


def _support(n, dt, t_start, t_end):
    t = np.arange(n) * dt
    t_start = 0.0 if t_start is None else t_start
    t_end = (n - 1) * dt if t_end is None else t_end
    if not t_start < t_end:
        raise ValueError("t_start must be smaller than t_end")
    inside = (t >= t_start) & (t <= t_end)
    return t, t_start, t_end, inside


def gen_linear_chirp(n, f0, f1, dt=1.0, amp=1.0, t_start=None, t_end=None,
                     phase=0.0) -> Signal:
    """Linear chirp sweeping ``f0 -> f1`` over ``[t_start, t_end]``, zero elsewhere.

    ``phase`` (radians) is added inside the cosine; ``-pi/2`` starts the
    support at a zero crossing.
    """
    _check_nyquist(dt, f0, f1)
    t, t_start, t_end, inside = _support(n, dt, t_start, t_end)
    s = t - t_start
    rate = (f1 - f0) / (t_end - t_start)
    cycles = f0 * s + 0.5 * rate * s**2
    x = np.where(inside, amp * np.cos(2 * np.pi * cycles + phase), 0.0)
    return Signal(x, dt, "linear_chirp")


def gen_exponential_chirp(n, f0, f1, dt=1.0, amp=1.0, t_start=None, t_end=None,
                          phase=0.0) -> Signal:
    """Chirp whose instantaneous frequency grows geometrically from ``f0`` to ``f1``.

    The IF is ``f0 * (f1/f0) ** (s / T)`` with ``s`` the time since ``t_start``
    and ``T`` the support length, so at mid-support it equals ``sqrt(f0*f1)``.
    """
    if not 0 < f0 <= f1:
        raise ValueError("need 0 < f0 <= f1")
    _check_nyquist(dt, f0, f1)
    t, t_start, t_end, inside = _support(n, dt, t_start, t_end)
    s = t - t_start
    span = t_end - t_start
    k = np.log(f1 / f0) / span
    cycles = f0 * s if k == 0 else f0 * np.expm1(k * s) / k
    x = np.where(inside, amp * np.cos(2 * np.pi * cycles + phase), 0.0)
    return Signal(x, dt, "exponential_chirp")


def gen_sinusoidal_chirp(n, f_mean, f_dev, f_mod, dt=1.0, amp=1.0) -> Signal:
    """Cosine with IF ``f_mean + f_dev * sin(2 pi f_mod t)``."""
    _check_nyquist(dt, f_mean + abs(f_dev), max(f_mean - abs(f_dev), 0.0))
    if f_mean - abs(f_dev) < 0:
        raise ValueError("instantaneous frequency would become negative")
    t = np.arange(n) * dt
    if f_mod == 0:
        phase = f_mean * t
    else:
        # integral of f_dev*sin(2 pi f_mod t)
        phase = f_mean * t + f_dev * (1 - np.cos(2 * np.pi * f_mod * t)) / (2 * np.pi * f_mod)
    return Signal(amp * np.cos(2 * np.pi * phase), dt, "sinusoidal_chirp")


def gen_hermite(order, center, scale, n, dt=1.0) -> Signal:
    """Unit-energy Hermite function ``H_k(u) exp(-u**2/2)``, ``u = (t-center)/scale``.

    Raises
    ------
    OverflowError
        If the polynomial evaluation overflows for this order and grid.
    """
    if order < 0 or int(order) != order:
        raise ValueError("order must be a non-negative integer")
    if not scale > 0:
        raise ValueError("scale must be positive")
    u = (np.arange(n) * dt - center) / scale
    with np.errstate(over="ignore", invalid="ignore"):
        poly = eval_hermite(int(order), u)
        h = poly * np.exp(-0.5 * u**2)
    if not np.all(np.isfinite(h)):
        raise OverflowError(f"Hermite polynomial of order {order} overflows on this grid")
    norm = np.linalg.norm(h)
    if norm == 0:
        raise ValueError("Hermite function vanishes on the grid")
    return Signal(h / norm, dt, f"hermite{order}")


def gen_impulse(n, position, amp=1.0, dt=1.0) -> Signal:
    if not 0 <= position < n:
        raise ValueError(f"impulse position {position} outside [0, {n})")
    x = np.zeros(n)
    x[int(position)] = amp
    return Signal(x, dt, "impulse")


def gen_tone(n, f, dt=1.0, amp=1.0, phase=0.0) -> Signal:
    _check_nyquist(dt, f)
    t = np.arange(n) * dt
    return Signal(amp * np.cos(2 * np.pi * f * t + phase), dt, "tone")


def add_noise(x: Signal, snr_db: float, seed: int | None) -> Signal:
    """Add white Gaussian noise scaled so the realized SNR equals ``snr_db`` exactly."""
    if np.isposinf(snr_db):
        return x
    ex = x.energy
    if ex == 0:
        raise ValueError("cannot set a finite SNR on a zero-energy signal")
    w = np.random.default_rng(seed).standard_normal(len(x))
    w *= np.sqrt(ex / (np.dot(w, w) * 10 ** (snr_db / 10)))
    return x.with_samples(x.samples + w)


def snr_db(reference: Signal, estimate: Signal) -> float:
    """``10 log10(|ref|^2 / |ref - est|^2)``; ``inf`` for a perfect estimate."""
    ref = np.asarray(getattr(reference, "samples", reference), dtype=float)
    est = np.asarray(getattr(estimate, "samples", estimate), dtype=float)
    if ref.shape != est.shape:
        raise ValueError("reference and estimate lengths differ")
    num = np.dot(ref, ref)
    if num == 0:
        raise ValueError("reference signal has zero energy")
    err = ref - est
    den = np.dot(err, err)
    if den == 0:
        return float("inf")
    return float(10 * np.log10(num / den))


def mix(components) -> Signal:
    comps = list(components)
    out = comps[0]
    for c in comps[1:]:
        out = out + c
    return out.with_samples(out.samples, name="mixture")
