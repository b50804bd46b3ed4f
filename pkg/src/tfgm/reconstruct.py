"""Masked inversion of linear TFRs and component-wise error accounting."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .signals import Signal
from .tfr import TFR, Window

MISSING_ERROR = 1.0


@dataclass(frozen=True)
class ComponentEstimate:
    signal: Signal
    mask: np.ndarray
    source_kind: str

    def __post_init__(self):
        if self.mask.shape[1] != len(self.signal):
            raise ValueError("mask columns must match the signal length")


def invert_masked(R: TFR, mask: np.ndarray, g: Window | None = None) -> Signal:
    """``x[n] = Re(sum_v R[v, n] mask[v, n]) / (M g[0])``."""
    if R.kind not in ("stft", "sst1", "sst2"):
        raise ValueError(f"cannot invert a {R.kind} representation")
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != R.coeffs.shape:
        raise ValueError(f"mask shape {mask.shape} does not match TFR {R.coeffs.shape}")
    g = R.window if g is None else g
    col = np.where(mask, R.coeffs, 0).sum(axis=0)
    return Signal(col.real / (R.n_bins * g.center_value), R.dt)


def rel_error(truth: Signal, est: Signal) -> float:
    """``||truth - est|| / ||truth||``."""
    t = np.asarray(getattr(truth, "samples", truth), dtype=float)
    e = np.asarray(getattr(est, "samples", est), dtype=float)
    if t.shape != e.shape:
        raise ValueError("truth and estimate lengths differ")
    nt = np.linalg.norm(t)
    if nt == 0:
        raise ValueError("truth signal has zero energy")
    return float(np.linalg.norm(t - e) / nt)


@dataclass(frozen=True)
class Matching:
    assignment: list[int | None]  # estimate index per truth component
    errors: list[float]

    @property
    def total(self) -> float:
        return float(sum(self.errors))


def _signal_of(e):
    return e.signal if isinstance(e, ComponentEstimate) else e


def error_matrix(truth, estimates) -> np.ndarray:
    return np.array([[rel_error(t, _signal_of(e)) for e in estimates] for t in truth]).reshape(
        len(truth), len(estimates))


def match_components(truth, estimates) -> Matching:
    """Injective truth-to-estimate assignment minimising the summed relative error.

    An unmatched truth component scores ``MISSING_ERROR`` (the error of a
    zero estimate); unused estimates are ignored. Solved exactly as a
    rectangular assignment problem with one "missing" slot per truth.
    """
    truth = list(truth)
    if not truth:
        raise ValueError("need at least one truth component")
    estimates = list(estimates)
    K, E = len(truth), len(estimates)
    cost = np.full((K, E + K), MISSING_ERROR)
    if E:
        cost[:, :E] = error_matrix(truth, estimates)
    rows, cols = linear_sum_assignment(cost)
    assignment: list[int | None] = [None] * K
    errors = [MISSING_ERROR] * K
    for i, j in zip(rows, cols):
        if j < E and cost[i, j] < MISSING_ERROR:
            assignment[i] = int(j)
            errors[i] = float(cost[i, j])
    return Matching(assignment, errors)


def match_components_exhaustive(truth, estimates) -> Matching:
    """Brute-force reference for :func:`match_components` (small problems only)."""
    truth = list(truth)
    estimates = list(estimates)
    K, E = len(truth), len(estimates)
    err = error_matrix(truth, estimates) if E else np.zeros((K, 0))
    best = None
    choices = list(range(E)) + [None] * K
    for combo in set(itertools.permutations(choices, K)):
        errs = [MISSING_ERROR if j is None else float(err[i, j]) for i, j in enumerate(combo)]
        total = sum(errs)
        if best is None or total < best[0] - 1e-15:
            best = (total, list(combo), errs)
    return Matching(best[1], best[2])
