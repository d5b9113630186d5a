import numpy as np
import pytest

from snchange.datamodel import DataMatrix, Interval
from snchange.errors import DegenerateNormalizerError, InvalidSplitError, IntervalTooShortError
from snchange.sntest import (
    Preprocessing,
    preprocess,
    scan_statistic,
    self_normalizer,
    sn_statistic,
)
from snchange.ustat import u_stat_naive


def brute_sn_value(X, q, s=1, m=None):
    """max_k U^2/W assembled from the naive U-statistic, on raw data."""
    m = X.n if m is None else m
    best = -1.0
    arg = None
    for k in range(s + 2 * q - 1, m - 2 * q + 1):
        u = u_stat_naive(X, q, k, s, m)
        left = sum(u_stat_naive(X, q, t, s, k) ** 2 for t in range(s + q - 1, k - q + 1))
        right = sum(u_stat_naive(X, q, t, k + 1, m) ** 2 for t in range(k + q, m - q + 1))
        w = (left + right) / (m - s + 1)
        r = u * u / w if w > 0 else (np.inf if u != 0 else 0.0)
        if r > best:
            best, arg = r, k
    return best, arg


class TestPreprocess:
    def test_centering_and_scaling(self, rng):
        X = DataMatrix(rng.standard_normal((20, 3)) * 5 + 2)
        res = preprocess(X)
        assert np.allclose(res.values.mean(axis=0), 0, atol=1e-12)
        assert np.isclose(res.values.std(), 1.0)

    def test_constant_data_degenerate(self):
        with pytest.raises(DegenerateNormalizerError):
            preprocess(DataMatrix(np.ones((10, 2))))

    def test_disabled(self, rng):
        X = DataMatrix(rng.standard_normal((10, 2)))
        res = preprocess(X, Preprocessing(center=False, scale=False))
        assert np.array_equal(res.values, X.values)


class TestSelfNormalizer:
    def test_matches_brute_force(self, backend, rng):
        X = DataMatrix(rng.standard_normal((12, 2)))
        q, k, s, m = 2, 6, 2, 11
        left = sum(u_stat_naive(X, q, t, s, k) ** 2 for t in range(s + q - 1, k - q + 1))
        right = sum(u_stat_naive(X, q, t, k + 1, m) ** 2 for t in range(k + q, m - q + 1))
        expected = (left + right) / (m - s + 1)
        assert np.isclose(self_normalizer(X, q, k, s, m), expected, rtol=1e-9)

    def test_trimming_enforced(self, rng):
        X = DataMatrix(rng.standard_normal((12, 2)))
        with pytest.raises(InvalidSplitError):
            self_normalizer(X, 2, 2)

    def test_degenerate_raises(self):
        vals = np.zeros((12, 2))
        vals[0, 0] = 1.0  # constant except far outside all subsample sums
        with pytest.raises(DegenerateNormalizerError):
            self_normalizer(DataMatrix(np.zeros((12, 2))), 2, 6)


class TestSnStatistic:
    def test_matches_brute_force(self, backend, rng):
        X = DataMatrix(rng.standard_normal((14, 2)))
        prof = sn_statistic(X, 2)
        y = preprocess(X).values
        best, arg = brute_sn_value(DataMatrix(y), 2)
        assert np.isclose(prof.value, best, rtol=1e-8)
        assert prof.argmax == arg

    def test_affine_invariance(self, backend, rng):
        X = DataMatrix(rng.standard_normal((16, 3)))
        Y = DataMatrix(3.7 * X.values + rng.standard_normal(3))
        for q in (2, 4):
            a = sn_statistic(X, q)
            b = sn_statistic(Y, q)
            assert np.isclose(a.value, b.value, rtol=1e-8)
            assert a.argmax == b.argmax

    def test_subinterval(self, backend, rng):
        X = DataMatrix(rng.standard_normal((20, 2)))
        iv = Interval(4, 17)
        prof = sn_statistic(X, 2, iv)
        # brute force on the globally preprocessed data restricted to iv
        y = preprocess(X).values
        best, arg = brute_sn_value(DataMatrix(y), 2, iv.s, iv.e)
        assert np.isclose(prof.value, best, rtol=1e-8)
        assert prof.argmax == arg
        assert prof.splits[0] == iv.s + 3 and prof.splits[-1] == iv.e - 4

    def test_interval_too_short(self, rng):
        X = DataMatrix(rng.standard_normal((20, 2)))
        with pytest.raises(IntervalTooShortError):
            sn_statistic(X, 4, Interval(1, 15))

    def test_obvious_break_location(self, backend, rng):
        x = rng.standard_normal((40, 5))
        x[20:] += 4.0
        prof = sn_statistic(DataMatrix(x), 2)
        assert abs(prof.argmax - 20) <= 1


class TestScanStatistic:
    def test_exceeds_head_plus_tail_on_grid(self, backend, rng):
        X = DataMatrix(rng.standard_normal((30, 2)))
        val = scan_statistic(X, 2, stride=1)
        y = DataMatrix(preprocess(X).values)
        head = max(brute_sn_value(y, 2, 1, l2)[0] for l2 in range(8, 31))
        tail = max(brute_sn_value(y, 2, m1, 30)[0] for m1 in range(1, 24))
        assert np.isclose(val, head + tail, rtol=1e-8)

    def test_stride_subsample_not_above_exact(self, backend, rng):
        X = DataMatrix(rng.standard_normal((40, 3)))
        assert scan_statistic(X, 2, stride=5) <= scan_statistic(X, 2, stride=1) + 1e-9

    def test_bad_stride(self, rng):
        X = DataMatrix(rng.standard_normal((40, 3)))
        with pytest.raises(ValueError):
            scan_statistic(X, 2, stride=0)
