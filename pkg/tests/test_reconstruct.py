import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfgm.reconstruct import (MISSING_ERROR, invert_masked, match_components,
                              match_components_exhaustive, rel_error)
from tfgm.signals import Signal, gen_tone
from tfgm.tfr import TFR, smooth_modulus, sst, stft, window_for


def _F(seed=0, n=300, M=128, sigma=6):
    x = Signal(np.random.default_rng(seed).standard_normal(n))
    return x, stft(x, window_for(sigma, M), M)


class TestInvert:
    @pytest.mark.parametrize("sigma", [2, 6, 15])
    def test_full_mask_round_trip(self, sigma):
        x, F = _F(sigma=sigma)
        y = invert_masked(F, np.ones(F.coeffs.shape, bool))
        assert rel_error(x, y) < 1e-12

    def test_zero_mask(self):
        _, F = _F()
        assert not np.any(invert_masked(F, np.zeros(F.coeffs.shape, bool)).samples)

    def test_disjoint_masks_add_up(self):
        x, F = _F(1)
        rng = np.random.default_rng(2)
        labels = rng.integers(0, 3, F.coeffs.shape)
        parts = [invert_masked(F, labels == k).samples for k in range(3)]
        np.testing.assert_allclose(sum(parts), x.samples, atol=1e-12)

    @given(st.integers(0, 1000), st.floats(-5, 5))
    @settings(max_examples=20, deadline=None)
    def test_linear_in_coefficients(self, seed, a):
        _, F = _F(seed % 7, n=100, M=32, sigma=3)
        _, G = _F(seed % 7 + 1, n=100, M=32, sigma=3)
        mask = np.random.default_rng(seed).random(F.coeffs.shape) < 0.5
        H = TFR(a * F.coeffs + G.coeffs, "stft", F.window)
        lhs = invert_masked(H, mask).samples
        rhs = a * invert_masked(F, mask).samples + invert_masked(G, mask).samples
        np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_sst_full_mask_round_trip(self):
        x = gen_tone(256, 0.15)
        g = window_for(6, 128)
        for order in (1, 2):
            S = sst(x, g, 128, order=order)
            y = invert_masked(S, np.ones(S.coeffs.shape, bool)).samples
            # the hard signal edges spread energy that is reassigned out of band
            np.testing.assert_allclose(y[40:-40], x.samples[40:-40], atol=1e-12)

    def test_rejects(self):
        _, F = _F()
        with pytest.raises(ValueError):
            invert_masked(F, np.ones((3, 3), bool))
        sm = TFR(smooth_modulus(F.modulus(half=False), 1.0), "smoothed-stft-modulus", F.window)
        with pytest.raises(ValueError):
            invert_masked(sm, np.ones(sm.coeffs.shape, bool))

    def test_mask_order_irrelevant(self):
        _, F = _F(4)
        mask = np.random.default_rng(0).random(F.coeffs.shape) < 0.3
        a = invert_masked(F, mask).samples
        b = invert_masked(F, mask.copy()).samples
        np.testing.assert_array_equal(a, b)


class TestRelError:
    def test_cases(self):
        x = gen_tone(64, 0.1)
        assert rel_error(x, x) == 0.0
        assert rel_error(x, Signal(np.zeros(64))) == 1.0
        assert rel_error(x, x.with_samples(-x.samples)) == pytest.approx(2.0)
        assert rel_error(x, x.with_samples(1.5 * x.samples)) == pytest.approx(0.5)

    def test_errors(self):
        with pytest.raises(ValueError):
            rel_error(Signal(np.zeros(4)), Signal(np.ones(4)))
        with pytest.raises(ValueError):
            rel_error(Signal(np.ones(4)), Signal(np.ones(3)))


def _truths(k, n=64, seed=0):
    rng = np.random.default_rng(seed)
    return [Signal(rng.standard_normal(n)) for _ in range(k)]


class TestMatching:
    def test_shuffled_exact(self):
        t = _truths(4)
        order = [2, 0, 3, 1]
        m = match_components(t, [t[i] for i in order])
        assert m.assignment == [1, 3, 0, 2]
        assert m.total == 0.0

    def test_no_estimates(self):
        m = match_components(_truths(3), [])
        assert m.assignment == [None] * 3
        assert m.errors == [MISSING_ERROR] * 3

    def test_bad_estimate_left_unmatched(self):
        t = _truths(1)
        m = match_components(t, [t[0].with_samples(-3 * t[0].samples)])
        assert m.assignment == [None] and m.errors == [1.0]

    def test_three_truths_four_estimates(self):
        t = _truths(3, seed=1)
        rng = np.random.default_rng(5)
        est = [t[1].with_samples(t[1].samples + 0.1 * rng.standard_normal(64)),
               Signal(rng.standard_normal(64)),
               t[0].with_samples(0.8 * t[0].samples),
               t[2].with_samples(t[2].samples + 0.3 * rng.standard_normal(64))]
        m = match_components(t, est)
        ref = match_components_exhaustive(t, est)
        assert m.assignment == ref.assignment == [2, 0, 3]
        assert m.total == pytest.approx(ref.total)

    def test_needs_truth(self):
        with pytest.raises(ValueError):
            match_components([], _truths(1))

    @given(st.integers(1, 4), st.integers(0, 5), st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_matches_exhaustive(self, k, e, seed):
        t = _truths(k, n=16, seed=seed)
        rng = np.random.default_rng(seed + 1)
        pool = t + _truths(2, n=16, seed=seed + 2)
        est = [s.with_samples(s.samples * rng.uniform(0.3, 1.7) + 0.3 * rng.standard_normal(16))
               for s in (pool[i] for i in rng.integers(0, len(pool), e))]
        fast = match_components(t, est)
        slow = match_components_exhaustive(t, est)
        assert fast.total == pytest.approx(slow.total, abs=1e-12)
        used = [j for j in fast.assignment if j is not None]
        assert len(used) == len(set(used))
