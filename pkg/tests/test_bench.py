import math
from dataclasses import replace

import numpy as np
import pytest

from tfgm.bench import (BenchResult, BenchRow, Scenario, builtin_scenarios, load_scenario,
                        realization_seed, run_benchmark, summarize, summary_csv)

from oracles import sorted_median


def _small(name="hermite-chirp", **kw):
    s = load_scenario(name)
    return replace(s, **{"snr_db": [20], "realizations": 2, **kw})


def test_builtins_load():
    names = builtin_scenarios()
    assert {"hermite-chirp", "sinusoidal-chirp", "impulse-chirps", "tone"} <= set(names)
    for n in names:
        s = load_scenario(n)
        assert all(len(t) == s.n for t in s.truth())


def test_equal_energy():
    for t in load_scenario("hermite-chirp").truth():
        assert t.energy == pytest.approx(1.0)


def test_bad_scenarios():
    with pytest.raises(ValueError):
        load_scenario("no-such-scenario")
    with pytest.raises(ValueError):
        Scenario("x", [{"kind": "wavelet"}], [10])
    with pytest.raises(ValueError):
        Scenario("x", [{"kind": "tone", "params": {"f": 0.1}}], [10], realizations=0)


def test_tone_single_row():
    r = run_benchmark(load_scenario("tone"), ["A"])
    assert len(r.rows) == 1
    assert r.rows[0].status == "ok" and r.rows[0].rel_error < 0.01


def test_realization_seed_shared():
    s = _small(snr_db=[10, 30])
    r = run_benchmark(s, ["A", "B"])
    seeds = {(row.realization, row.seed) for row in r.rows}
    assert seeds == {(k, realization_seed(s.seed, k)) for k in range(2)}
    assert realization_seed(1, 0) != realization_seed(1, 1) != realization_seed(2, 1)


def test_row_count_and_determinism():
    s = _small()
    a = run_benchmark(s, ["A", "D"])
    assert len(a.rows) == 2 * 1 * 2 * 2
    b = run_benchmark(s, ["A", "D"])
    assert a.to_csv() == b.to_csv()
    assert run_benchmark(s, ["A", "D"], root_seed=5).to_csv() != a.to_csv()


def test_workers_match_serial():
    s = _small()
    assert run_benchmark(s, ["B"], workers=2).to_csv() == run_benchmark(s, ["B"]).to_csv()


def test_csv_round_trip():
    r = run_benchmark(_small(), ["A"])
    assert BenchResult.from_csv(r.to_csv()).to_csv() == r.to_csv()


def test_error_rows_recorded():
    s = Scenario("t", [{"kind": "tone", "params": {"f": 0.1}}], [10], n=64, realizations=1,
                 method={"M": 64, "sigma": 100.0})
    r = run_benchmark(s, ["A"])
    assert r.rows[0].status.startswith("error") and math.isnan(r.rows[0].rel_error)


def _row(err, k=0, comp=0):
    return BenchRow("s", "A", 10.0, k, 0, comp, err, 1)


class TestSummarize:
    def test_single_row(self):
        (s,) = summarize(BenchResult([_row(0.3)]))
        assert s.median == 0.3 and s.iqr == 0 and s.n == 1

    def test_constant_column(self):
        (s,) = summarize(BenchResult([_row(0.25, k) for k in range(7)]))
        assert s.median == s.q1 == s.q3 == 0.25

    @pytest.mark.parametrize("k", [5, 31])
    def test_median_matches_sort(self, k):
        vals = np.random.default_rng(k).random(k).tolist()
        (s,) = summarize(BenchResult([_row(v, i) for i, v in enumerate(vals)]))
        assert s.median == sorted_median(vals)
        assert (s.min, s.max) == (min(vals), max(vals))

    def test_nan_excluded_and_order(self):
        rows = [_row(0.1, 0, 1), _row(math.nan, 1, 1), _row(0.5, 0, 0)]
        out = summarize(BenchResult(rows))
        assert [s.component for s in out] == [0, 1]
        assert out[1].n == 1
        assert summary_csv(out).splitlines()[0].startswith("scenario,method")

    def test_empty(self):
        with pytest.raises(ValueError):
            summarize(BenchResult([]))


def test_method_a_beats_d_on_hermite():
    s = replace(load_scenario("hermite-chirp"), snr_db=[20], realizations=7)
    med = {m: np.median([r.rel_error for r in run_benchmark(s, [m]).rows if r.component == 1])
           for m in ("A", "D")}
    assert med["A"] < med["D"]
