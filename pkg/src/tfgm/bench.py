"""Monte Carlo benchmark: scenarios x methods x SNRs x realizations."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import signals as sg
from .io import atomic_write
from .methods import MethodConfig, method_presets, run_method
from .reconstruct import match_components

GENERATORS = {
    "linear_chirp": sg.gen_linear_chirp,
    "exponential_chirp": sg.gen_exponential_chirp,
    "sinusoidal_chirp": sg.gen_sinusoidal_chirp,
    "hermite": sg.gen_hermite,
    "impulse": sg.gen_impulse,
    "tone": sg.gen_tone,
}

METRIC = "rel_l2"
RESULT_HEADER = ["scenario", "method", "snr_db", "realization", "seed", "component",
                 "metric", "rel_error", "component_count", "status"]
SUMMARY_HEADER = ["scenario", "method", "snr_db", "component", "n", "median", "q1", "q3",
                  "min", "max"]


def _parse_snr(v) -> float:
    return math.inf if str(v).lower() in ("inf", "+inf", "infinity") else float(v)


def _fmt_snr(v: float) -> str:
    return "inf" if math.isinf(v) else repr(float(v))


@dataclass(frozen=True)
class Scenario:
    name: str
    components: list
    snr_db: list
    n: int = 1024
    dt: float = 1.0
    realizations: int = 30
    seed: int = 0
    equal_energy: bool = False
    method: dict = field(default_factory=dict)
    description: str = ""

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        if not self.components:
            raise ValueError("a scenario needs at least one component")
        for c in self.components:
            if c["kind"] not in GENERATORS:
                raise ValueError(f"unknown generator {c['kind']!r}")
        object.__setattr__(self, "snr_db", [_parse_snr(v) for v in self.snr_db])

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "name": self.name, "description": self.description, "n": self.n, "dt": self.dt,
            "equal_energy": self.equal_energy, "components": self.components,
            "snr_db": [_fmt_snr(v) if math.isinf(v) else v for v in self.snr_db],
            "realizations": self.realizations, "seed": self.seed, "method": self.method,
        }

    def truth(self) -> list[sg.Signal]:
        """Clean components; unit energy each when ``equal_energy`` is set."""
        out = []
        for c in self.components:
            gen = GENERATORS[c["kind"]]
            params = dict(c.get("params", {}))
            s = gen(n=self.n, dt=self.dt, **params)
            if self.equal_energy:
                s = s.with_samples(s.samples / np.sqrt(s.energy))
            out.append(s)
        return out


def builtin_scenarios() -> list[str]:
    files = resources.files("tfgm").joinpath("scenarios").iterdir()
    return sorted(p.name[:-5] for p in files if p.name.endswith(".json"))


def load_scenario(name_or_path) -> Scenario:
    p = Path(str(name_or_path))
    if p.suffix == ".json" and p.exists():
        text = p.read_text()
    else:
        res = resources.files("tfgm").joinpath("scenarios", f"{name_or_path}.json")
        if not res.is_file():
            raise ValueError(f"unknown scenario {name_or_path!r}; built in: {builtin_scenarios()}")
        text = res.read_text()
    return Scenario.from_dict(json.loads(text))


def realization_seed(root_seed: int, realization: int) -> int:
    """Noise seed shared by every SNR and method of one realization."""
    return int(np.random.SeedSequence([root_seed, realization]).generate_state(1)[0])


@dataclass(frozen=True)
class BenchRow:
    scenario: str
    method: str
    snr_db: float
    realization: int
    seed: int
    component: int
    rel_error: float
    component_count: int
    status: str = "ok"

    def key(self):
        return (self.scenario, self.method, self.snr_db, self.realization, self.component)

    def as_list(self):
        return [self.scenario, self.method, _fmt_snr(self.snr_db), self.realization, self.seed,
                self.component, METRIC, repr(float(self.rel_error)), self.component_count,
                self.status]


@dataclass
class BenchResult:
    rows: list[BenchRow]
    timings: list[tuple] = field(default_factory=list)  # (scenario, method, snr, realization, ms)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RESULT_HEADER)
        for r in sorted(self.rows, key=BenchRow.key):
            w.writerow(r.as_list())
        return buf.getvalue()

    def timings_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", "method", "snr_db", "realization", "runtime_ms"])
        for s, m, snr, k, ms in sorted(self.timings, key=lambda t: t[:4]):
            w.writerow([s, m, _fmt_snr(snr), k, f"{ms:.3f}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "BenchResult":
        rows = []
        for d in csv.DictReader(io.StringIO(text)):
            rows.append(BenchRow(d["scenario"], d["method"], _parse_snr(d["snr_db"]),
                                 int(d["realization"]), int(d["seed"]), int(d["component"]),
                                 float(d["rel_error"]), int(d["component_count"]), d["status"]))
        return cls(rows)


def _resolve_method(m, overrides: dict) -> MethodConfig:
    if isinstance(m, MethodConfig):
        return m
    return replace(method_presets()[m], **overrides)


def _run_unit(scenario: Scenario, truth, cfg: MethodConfig, snr: float, k: int):
    seed = realization_seed(scenario.seed, k)
    label = cfg.method
    t0 = time.perf_counter()
    try:
        x = sg.add_noise(sg.mix(truth), snr, seed)
        res = run_method(x, cfg)
        match = match_components(truth, res.estimates)
        rows = [BenchRow(scenario.name, label, snr, k, seed, i, e, len(res.estimates))
                for i, e in enumerate(match.errors)]
    except Exception as exc:  # recorded per row, the sweep goes on
        status = f"error: {type(exc).__name__}: {exc}".replace("\n", " ")
        rows = [BenchRow(scenario.name, label, snr, k, seed, i, math.nan, 0, status)
                for i in range(len(truth))]
    ms = 1000.0 * (time.perf_counter() - t0)
    return rows, (scenario.name, label, snr, k, ms)


def _run_unit_packed(args):
    return _run_unit(*args)


def run_benchmark(s: Scenario, methods=("A", "B", "C", "D", "E"), root_seed: int | None = None,
                  workers: int = 1, progress=None) -> BenchResult:
    """Run every (method, SNR, realization) of a scenario.

    ``root_seed`` overrides the scenario seed. ``progress``, when given, is
    called with ``(done, total)`` after each work unit.
    """
    if root_seed is not None:
        s = replace(s, seed=int(root_seed))
    truth = s.truth()
    lengths = {len(t) for t in truth}
    if len(lengths) != 1:
        raise ValueError("truth components must have equal length")
    cfgs = [_resolve_method(m, s.method) for m in methods]
    units = [(s, truth, cfg, snr, k) for cfg in cfgs for snr in s.snr_db for k in range(s.realizations)]

    rows, timings = [], []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = ex.map(_run_unit_packed, units)
            for i, (r, t) in enumerate(results, 1):
                rows.extend(r)
                timings.append(t)
                if progress:
                    progress(i, len(units))
    else:
        for i, u in enumerate(units, 1):
            r, t = _run_unit(*u)
            rows.extend(r)
            timings.append(t)
            if progress:
                progress(i, len(units))
    return BenchResult(sorted(rows, key=BenchRow.key), timings)


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    method: str
    snr_db: float
    component: int
    n: int
    median: float
    q1: float
    q3: float
    min: float
    max: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def summarize(r: BenchResult) -> list[SummaryRow]:
    """Median and quartiles of ``rel_error`` per scenario/method/SNR/component.

    Rows whose run failed (NaN error) are left out of the statistics.
    """
    if not r.rows:
        raise ValueError("empty benchmark result")
    groups: dict[tuple, list[float]] = {}
    for row in r.rows:
        key = (row.scenario, row.method, row.snr_db, row.component)
        vals = groups.setdefault(key, [])
        if not math.isnan(row.rel_error):
            vals.append(row.rel_error)
    out = []
    for key in sorted(groups):
        v = np.asarray(groups[key], dtype=float)
        if v.size == 0:
            out.append(SummaryRow(*key, 0, *([math.nan] * 5)))
            continue
        q1, med, q3 = np.percentile(v, [25, 50, 75])
        out.append(SummaryRow(*key, int(v.size), float(med), float(q1), float(q3),
                              float(v.min()), float(v.max())))
    return out


def summary_csv(summary: list[SummaryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summary:
        w.writerow([s.scenario, s.method, _fmt_snr(s.snr_db), s.component, s.n,
                    *(repr(float(v)) for v in (s.median, s.q1, s.q3, s.min, s.max))])
    return buf.getvalue()


def plot_summary(r: BenchResult, path, snr: float | None = None) -> None:
    """Median-error curves (top row) and boxplots at one SNR (bottom row), one column per component."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    summary = summarize(r)
    comps = sorted({s.component for s in summary})
    methods = sorted({s.method for s in summary})
    snrs = sorted({s.snr_db for s in summary})
    snr = snrs[len(snrs) // 2] if snr is None else snr
    fig, axes = plt.subplots(2, len(comps), figsize=(5 * len(comps), 7), squeeze=False)
    for j, c in enumerate(comps):
        for m in methods:
            pts = [(s.snr_db, s.median) for s in summary if s.component == c and s.method == m]
            axes[0, j].plot(*zip(*pts), marker="o", label=m)
        axes[0, j].set(title=f"component {c}", xlabel="SNR (dB)", ylabel="median rel. error")
        axes[0, j].legend()
        data = [[row.rel_error for row in r.rows
                 if row.component == c and row.method == m and row.snr_db == snr
                 and not math.isnan(row.rel_error)] for m in methods]
        axes[1, j].boxplot(data)
        axes[1, j].set_xticks(range(1, len(methods) + 1), methods)
        axes[1, j].set(xlabel="method", ylabel=f"rel. error at {_fmt_snr(snr)} dB")
    fig.tight_layout()
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=100)
    plt.close(fig)
    with atomic_write(path, "wb") as fh:
        fh.write(buf.getvalue())


def stderr_progress(label: str):
    def report(done, total):
        if done == total or done % max(1, total // 20) == 0:
            print(f"[{label}] {done}/{total}", file=sys.stderr, flush=True)
    return report
