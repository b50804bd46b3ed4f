"""Acceptance criteria, one test each, at the stated tolerances.

Each test prints a PASS/FAIL line and records it for the terminal summary.
"""

import itertools
import time
from dataclasses import replace

import numpy as np

from tfgm.bench import load_scenario, run_benchmark
from tfgm.cli import main
from tfgm.graph import GraphConfig, build_components
from tfgm.methods import MethodConfig, run_method
from tfgm.noise import ThresholdSpec, estimate_gamma
from tfgm.reconstruct import invert_masked, match_components, rel_error
from tfgm.signals import Signal, add_noise, gen_tone, mix
from tfgm.tfr import INVALID, reassignment_operator, stft, synchrosqueeze, window_for

from conftest import ACCEPTANCE
from oracles import binarize_then_label, brute_force_partition

N, M = 1024, 512


def report(label, ok, detail):
    ACCEPTANCE.append((label, bool(ok), detail))
    print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
    assert ok, f"{label}: {detail}"


def test_1_round_trip():
    t0 = time.perf_counter()
    worst = 0.0
    for sigma in (5, 15, 40):
        g = window_for(sigma, M)
        for seed in range(20):
            x = Signal(np.random.default_rng(seed).standard_normal(N))
            F = stft(x, g, M)
            worst = max(worst, rel_error(x, invert_masked(F, np.ones(F.coeffs.shape, bool))))
    elapsed = time.perf_counter() - t0
    report("1 round-trip", worst < 1e-9 and elapsed < 10,
           f"max rel error {worst:.2e} (< 1e-9), {elapsed:.2f} s (< 10 s)")


def test_2_noise_estimator():
    g = window_for(15, M)
    ratios, kept = [], []
    for seed in range(30):
        F = stft(Signal(np.random.default_rng(seed).standard_normal(N)), g, M)
        gamma = estimate_gamma(F)
        ratios.append(gamma / np.std(F.coeffs.real))
        kept.append(np.mean(F.modulus() >= 3 * gamma))
    ratio, frac = np.median(ratios), np.median(kept)
    report("2 noise estimator", abs(ratio - 1) < 0.05 and frac <= 0.015,
           f"median gamma/std(Re F) = {ratio:.4f} (within 5%), "
           f"median kept at 3 gamma = {100 * frac:.3f}% (<= 1.5%)")


def test_3_graph_oracle():
    t0 = time.perf_counter()
    configs = list(itertools.product(("product", "min"), (1, 2, 3), (1, 2, np.inf)))
    mismatches = 0
    rng = np.random.default_rng(2024)
    for k in range(100):
        A = rng.random((20, 20)) ** 2
        A[rng.random((20, 20)) < 0.1] = 0.0
        for crit, r, p in configs:
            tau = rng.uniform(0.05, 0.5) if crit == "product" else rng.uniform(0.2, 0.7)
            cs = build_components(A, GraphConfig(ThresholdSpec(crit, tau, "stft-modulus"), r, p))
            parts, n_edges = brute_force_partition(A, crit, tau, r, p)
            if cs.partition() != parts or sum(c.edge_count for c in cs) != n_edges:
                mismatches += 1
    elapsed = time.perf_counter() - t0
    report("3 graph oracle", mismatches == 0 and elapsed < 30,
           f"{mismatches} mismatches over {100 * len(configs)} cases, {elapsed:.2f} s (< 30 s)")


def _mirrored(parts, n):
    out = []
    for part in parts:
        rows, cols = np.divmod(np.array(sorted(part)), n)
        m = np.zeros((M, n), bool)
        m[rows, cols] = True
        m[(M - rows) % M, cols] = True
        out.append(m.tobytes())
    return sorted(out)


def test_4_method_b_equivalence():
    names = ("hermite-chirp", "sinusoidal-chirp", "impulse-chirps")
    rng = np.random.default_rng(4)
    bad = 0
    for k in range(20):
        s = load_scenario(names[k % 3])
        x = add_noise(mix(s.truth()), float(rng.uniform(0, 40)), int(rng.integers(2**31)))
        cfg = MethodConfig.from_dict({"method": "B", "selection": {"min_edges": 0}})
        res = run_method(x, cfg)
        parts = binarize_then_label(res.modulus, 3 * res.diagnostics["gamma"], cfg.r, cfg.p)
        got = sorted(e.mask.tobytes() for e in res.estimates)
        if res.components.partition() != parts or got != _mirrored(parts, len(x)):
            bad += 1
    report("4 method B equivalence", bad == 0, f"{bad}/20 signals differ (exact mask equality)")


def test_5_toy_and_impulse_chirps():
    A = np.zeros((16, 16))
    A[2:5, 2:5] = 1
    A[9:13, 8:12] = 1
    n_toy = len(build_components(A, GraphConfig(ThresholdSpec("min", 0.5, "stft-modulus"), 1, 1)))

    s = load_scenario("impulse-chirps")
    truth = s.truth()
    cfg = MethodConfig.from_dict({"method": "A", **s.method})
    counts, errors, aspect = [], [], []
    for seed in range(10):
        res = run_method(add_noise(mix(truth), 20, seed), cfg)
        match = match_components(truth, res.estimates)
        counts.append(len(res.estimates))
        errors.append(match.errors)
        j = match.assignment[0]
        if j is None:
            aspect.append(0.0)
            continue
        rows, cols = np.nonzero(res.estimates[j].mask[: M // 2 + 1])
        aspect.append((np.ptp(rows) + 1) / (np.ptp(cols) + 1))
    med_count = np.median(counts)
    med_err = np.median(np.array(errors), axis=0)
    med_aspect = np.median(aspect)
    ok = n_toy == 2 and med_count >= 3 and np.all(med_err <= 0.5) and med_aspect >= 3
    report("5 toy + impulse/chirps", ok,
           f"toy components {n_toy} (== 2), median selected {med_count:g} (>= 3), "
           f"median errors {np.round(med_err, 3).tolist()} (<= 0.5), "
           f"impulse mask rows/cols span ratio {med_aspect:.1f} (>= 3)")


def test_6_hermite_ordering():
    t0 = time.perf_counter()
    s = replace(load_scenario("hermite-chirp"), snr_db=[20], realizations=30)
    r = run_benchmark(s, ["A", "C", "D"])
    med = {m: float(np.median([row.rel_error for row in r.rows
                                if row.method == m and row.component == 1]))
           for m in ("A", "C", "D")}
    elapsed = time.perf_counter() - t0
    report("6 hermite ordering", med["A"] < med["C"] and med["A"] < med["D"] and elapsed < 300,
           f"median Hermite error A {med['A']:.4f}, C {med['C']:.4f}, D {med['D']:.4f}; "
           f"{elapsed:.1f} s (< 300 s)")


def test_7_sst_concentration():
    x = gen_tone(N, 0.125)
    g = window_for(15, M)
    F = stft(x, g, M)
    om = reassignment_operator(x, g, M, order=2)
    S = synchrosqueeze(F, om)
    half = M // 2 + 1
    interior = range(200, N - 200)
    conc = min(np.sort(np.abs(S.coeffs[:half, n]) ** 2)[-3:].sum()
               / (np.abs(S.coeffs[:half, n]) ** 2).sum() for n in interior)

    worst = 0.0
    for sig in (x, Signal(np.random.default_rng(7).standard_normal(N))):
        F = stft(sig, g, M)
        om = reassignment_operator(sig, g, M, order=2)
        S = synchrosqueeze(F, om)
        valid = (om != INVALID) & (om >= 0) & (om < M)
        expected = np.where(valid, F.coeffs, 0).sum(axis=0)
        scale = np.maximum(np.abs(F.coeffs).sum(axis=0), 1.0)
        worst = max(worst, float(np.max(np.abs(S.coeffs.sum(axis=0) - expected) / scale)))
    report("7 SST concentration", conc >= 0.95 and worst <= 1e-12,
           f"min top-3 energy share {conc:.4f} (>= 0.95), "
           f"column-sum deviation {worst:.1e} (<= 1e-12)")


def test_8_bench_determinism(tmp_path):
    args = ["bench", "--scenario", "hermite-chirp", "--methods", "A,B,C,D,E",
            "--snr", "10,30", "--realizations", "2", "--seed", "99"]
    rc = [main(args + ["--out", str(tmp_path / d)]) for d in ("a", "b")]
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in ("bench.csv", "summary.csv"))
    report("8 bench determinism", rc == [0, 0] and same,
           f"exit codes {rc}, bench.csv and summary.csv byte-identical: {same}")


def test_9_simultaneity():
    s = load_scenario("impulse-chirps")
    x = add_noise(mix(s.truth()), 15, 9)
    res = run_method(x, MethodConfig(method="A", selection={"min_edges": 0}))
    rng = np.random.default_rng(9)
    identical = True
    for _ in range(5):
        order = rng.permutation(len(res.estimates))
        redone = {int(i): invert_masked(res.representation, res.estimates[i].mask) for i in order}
        identical &= all(np.array_equal(redone[i].samples, e.signal.samples)
                         for i, e in enumerate(res.estimates))
    report("9 simultaneity", identical and len(res.estimates) >= 2,
           f"{len(res.estimates)} components bit-identical under 5 permutations: {identical}")
