"""End-to-end masking pipelines: Methods A-E and custom configurations."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .graph import (ComponentSet, GraphConfig, SelectionPolicy, build_components,
                    component_to_mask, select_components)
from .noise import DEFAULT_E_QUANTILE, GAMMA_CONVENTIONS, ThresholdSpec, estimate_gamma, method_threshold
from .reconstruct import ComponentEstimate, invert_masked
from .signals import Signal
from .tfr import TFR, Window, reassignment_operator, smooth_modulus, stft, synchrosqueeze, window_for

REPRESENTATIONS = ("stft", "sst2", "smoothed-stft")
TARGET_OF = {"stft": "stft-modulus", "sst2": "sst2-modulus", "smoothed-stft": "smoothed-stft-modulus"}
METHODS = ("A", "B", "C", "D", "E")


@dataclass(frozen=True)
class MethodConfig:
    """Everything needed to run one masking pipeline.

    ``gamma_multiplier`` and ``tau`` only apply to ``method="custom"``: the
    threshold is ``tau`` when given, else ``gamma_multiplier * gamma`` (squared
    for the product criterion, divided by sigma on the SST).

    ``sst_sigma`` picks the divisor used for SST thresholds: ``"ridge"`` is
    the STFT-to-SST ridge amplitude ratio of this STFT normalization,
    ``sum(g) / (M g[0])``; ``"samples"`` is the window width itself.

    ``gamma_convention`` is passed to :func:`~tfgm.noise.estimate_gamma`.
    """

    method: str = "A"
    representation: str = "stft"
    criterion: str = "product"
    sigma: float = 15.0
    M: int = 512
    r: int = 2
    p: float = 1
    selection: dict = field(default_factory=lambda: {"min_energy_fraction": 0.01})
    kernel_sigma: float = 2.0
    e_quantile: float = DEFAULT_E_QUANTILE
    gamma_multiplier: float = 3.0
    tau: float | None = None
    sst_sigma: str = "ridge"
    gamma_convention: str = "real"

    def __post_init__(self):
        if self.method not in METHODS + ("custom",):
            raise ValueError(f"unknown method {self.method!r}")
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"unknown representation {self.representation!r}")
        if self.criterion not in ("product", "min"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not self.sigma > 0 or not self.kernel_sigma > 0:
            raise ValueError("sigma and kernel_sigma must be positive")
        if self.M < 2:
            raise ValueError("M must be at least 2")
        if self.sst_sigma not in ("ridge", "samples"):
            raise ValueError("sst_sigma must be 'ridge' or 'samples'")
        if self.gamma_convention not in GAMMA_CONVENTIONS:
            raise ValueError(f"gamma_convention must be one of {GAMMA_CONVENTIONS}")
        if self.method in METHODS:
            preset = _PRESET_SHAPE[self.method]
            if (self.representation, self.criterion) != preset:
                raise ValueError(f"method {self.method} requires representation/criterion {preset}")
        SelectionPolicy(**self.selection)
        GraphConfig(ThresholdSpec(self.criterion, 0.0, TARGET_OF[self.representation]), self.r, self.p)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["p"] == np.inf:
            d["p"] = "inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MethodConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if d.get("p") in ("inf", "Infinity", float("inf")):
            d["p"] = np.inf
        base = method_presets().get(d.get("method", "A"), cls())
        return replace(base, **d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MethodConfig":
        return cls.from_dict(json.loads(text))


_PRESET_SHAPE = {
    "A": ("stft", "product"),
    "B": ("stft", "min"),
    "C": ("sst2", "product"),
    "D": ("sst2", "min"),
    "E": ("smoothed-stft", "min"),
}


def method_presets() -> dict[str, MethodConfig]:
    return {m: MethodConfig(method=m, representation=rep, criterion=crit)
            for m, (rep, crit) in _PRESET_SHAPE.items()}


@dataclass
class MethodResult:
    estimates: list[ComponentEstimate]
    components: ComponentSet
    diagnostics: dict
    representation: TFR
    modulus: np.ndarray


def sst_divisor(cfg: MethodConfig, g: Window) -> float:
    """Factor by which SST ridges exceed STFT ridges is ``1 / sst_divisor``."""
    if cfg.sst_sigma == "samples":
        return cfg.sigma
    return float(g.taps.sum() / (cfg.M * g.center_value))


def _threshold(cfg: MethodConfig, gamma: float, smoothed, g: Window) -> ThresholdSpec:
    if cfg.method in METHODS:
        return method_threshold(cfg.method, gamma, sst_divisor(cfg, g), cfg.e_quantile, smoothed)
    target = TARGET_OF[cfg.representation]
    if cfg.tau is not None:
        return ThresholdSpec(cfg.criterion, float(cfg.tau), target)
    if cfg.representation == "smoothed-stft":
        tau = 0.0 if gamma == 0 else float(np.quantile(smoothed, cfg.e_quantile))
        return ThresholdSpec(cfg.criterion, tau, target)
    base = cfg.gamma_multiplier * gamma
    if cfg.representation == "sst2":
        base /= sst_divisor(cfg, g)
    return ThresholdSpec(cfg.criterion, base**2 if cfg.criterion == "product" else base, target)


def run_method(x: Signal, cfg: MethodConfig) -> MethodResult:
    """Representation -> threshold -> pixel graph -> selected masks -> inversions.

    The noise level is always estimated on the plain STFT. Every selected
    mask is inverted independently of the others.
    """
    g = window_for(cfg.sigma, cfg.M)
    F = stft(x, g, cfg.M)
    gamma = estimate_gamma(F, cfg.gamma_convention)
    half = F.half_bins

    smoothed = None
    if cfg.representation == "stft":
        R = F
        A = F.modulus()
    elif cfg.representation == "sst2":
        S = synchrosqueeze(F, reassignment_operator(x, g, cfg.M, order=2))
        R = TFR(S.coeffs, "sst2", g, x.dt)
        A = R.modulus()
    else:
        R = F
        smoothed = smooth_modulus(F.modulus(), cfg.kernel_sigma)
        A = smoothed

    spec = _threshold(cfg, gamma, smoothed, g)
    gcfg = GraphConfig(spec, cfg.r, cfg.p)
    found = build_components(A, gcfg)
    chosen = select_components(found, cfg.selection)

    dims = R.coeffs.shape
    source = "stft" if R.kind == "stft" else R.kind
    estimates = []
    for c in chosen:
        mask = component_to_mask(c, dims)
        estimates.append(ComponentEstimate(invert_masked(R, mask, g), mask, source))

    diagnostics = {
        "method": cfg.method,
        "representation": cfg.representation,
        "gamma": gamma,
        "gamma_convention": cfg.gamma_convention,
        "tau": spec.tau,
        "criterion": spec.criterion,
        "target": spec.target,
        "r": cfg.r,
        "p": "inf" if cfg.p == np.inf else cfg.p,
        "half_bins": half,
        "sst_divisor": sst_divisor(cfg, g) if cfg.representation == "sst2" else None,
        "components_found": len(found),
        "components_selected": len(chosen),
        "components": [
            {"id": i, "edge_count": c.edge_count, "pixel_count": c.size, "energy": c.total_energy}
            for i, c in enumerate(chosen)
        ],
    }
    if cfg.representation == "smoothed-stft" or cfg.method == "E":
        diagnostics["e_quantile"] = cfg.e_quantile
        diagnostics["kernel_sigma"] = cfg.kernel_sigma
    return MethodResult(estimates, chosen, diagnostics, R, A)
