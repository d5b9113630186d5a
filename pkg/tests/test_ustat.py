import math

import numpy as np
import pytest

from snchange.datamodel import DataMatrix, Interval
from snchange.errors import (
    IntervalTooShortError,
    InvalidSplitError,
    OrderExceedsQError,
    SizeGuardError,
)
from snchange.ustat import (
    distinct_product_sum,
    falling_factorial,
    normalized_t_stat,
    prefix_power_sums,
    u_profile,
    u_stat,
    u_stat_naive,
)


def rel_close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class TestPrefixPowerSums:
    def test_interval_power_sum(self, rng):
        X = DataMatrix(rng.standard_normal((7, 3)))
        pps = prefix_power_sums(X, 4)
        for r in (1, 2, 3, 4):
            expected = float((X.values[2:6, 1] ** r).sum())
            assert rel_close(pps.interval_power_sum(Interval(3, 6), r, 2), expected)

    def test_power_out_of_range(self, rng):
        pps = prefix_power_sums(DataMatrix(rng.standard_normal((5, 2))), 2)
        with pytest.raises(OrderExceedsQError):
            pps.interval_power_sum(Interval(1, 3), 3, 1)


class TestDistinctProductSum:
    def test_matches_enumeration(self, rng):
        X = DataMatrix(rng.standard_normal((6, 2)))
        pps = prefix_power_sums(X, 4)
        vals = X.values[1:5, 0]
        for c in range(5):
            if c == 0:
                expected = 1.0
            else:
                from itertools import permutations

                expected = sum(
                    math.prod(vals[list(t)]) for t in permutations(range(4), c)
                )
            assert rel_close(distinct_product_sum(pps, Interval(2, 5), c, 1), expected)

    def test_zero_beyond_interval_length(self, rng):
        X = DataMatrix(rng.standard_normal((6, 2)))
        pps = prefix_power_sums(X, 4)
        assert distinct_product_sum(pps, Interval(2, 3), 4, 1) == 0.0


class TestUStatOracle:
    def test_small_instances_both_backends(self, backend, rng):
        for _ in range(10):
            n = int(rng.integers(6, 11))
            p = int(rng.integers(1, 4))
            X = DataMatrix(rng.standard_normal((n, p)))
            for q in (2, 4):
                pps = prefix_power_sums(X, q)
                for s in range(1, n):
                    for m in range(s + 2 * q - 1, n + 1):
                        for k in range(s + q - 1, m - q + 1):
                            fast = u_stat(X, q, k, s, m, pps=pps)
                            slow = u_stat_naive(X, q, k, s, m)
                            assert rel_close(fast, slow), (n, p, q, k, s, m)

    def test_short_sides_are_zero(self, rng):
        X = DataMatrix(rng.standard_normal((8, 2)))
        assert u_stat(X, 4, 2, 1, 8) == 0.0
        assert u_stat_naive(X, 4, 2, 1, 8) == 0.0

    def test_split_validation(self, rng):
        X = DataMatrix(rng.standard_normal((8, 2)))
        with pytest.raises(InvalidSplitError):
            u_stat(X, 2, 8, 1, 8)
        with pytest.raises(InvalidSplitError):
            u_stat(X, 2, 0, 1, 8)

    def test_naive_budget_guard(self, rng):
        X = DataMatrix(rng.standard_normal((30, 1)))
        with pytest.raises(SizeGuardError):
            u_stat_naive(X, 4, 15, tuple_budget=10)


class TestInvariances:
    def test_shift_invariance(self, backend, rng):
        X = DataMatrix(rng.standard_normal((12, 3)))
        shifted = DataMatrix(X.values + rng.standard_normal(3))
        for q in (2, 4):
            assert rel_close(u_stat(X, q, 6), u_stat(shifted, q, 6), 1e-8)

    def test_homogeneity(self, backend, rng):
        X = DataMatrix(rng.standard_normal((12, 3)))
        c = 1.7
        scaled = DataMatrix(c * X.values)
        for q in (2, 4):
            assert rel_close(u_stat(scaled, q, 5), c**q * u_stat(X, q, 5), 1e-8)

    def test_coordinate_permutation(self, backend, rng):
        X = DataMatrix(rng.standard_normal((12, 4)))
        perm = rng.permutation(4)
        Y = DataMatrix(X.values[:, perm])
        assert rel_close(u_stat(X, 2, 6), u_stat(Y, 2, 6), 1e-10)

    def test_time_reversal_symmetry(self, backend, rng):
        # reversing time swaps the two samples; the kernel gains (-1)^q = 1
        X = DataMatrix(rng.standard_normal((10, 3)))
        rev = DataMatrix(X.values[::-1])
        for q in (2, 4):
            assert rel_close(u_stat(X, q, 4, 1, 10), u_stat(rev, q, 6, 1, 10), 1e-8)


class TestUProfile:
    def test_matches_pointwise(self, backend, rng):
        X = DataMatrix(rng.standard_normal((11, 2)))
        prof = u_profile(X, 2, Interval(2, 9))
        ks = range(3, 8)  # splits s+q-1 .. m-q
        assert prof.shape == (len(list(ks)),)
        for i, k in enumerate(ks):
            assert rel_close(prof[i], u_stat(X, 2, k, 2, 9), 1e-10)

    def test_too_short(self, rng):
        X = DataMatrix(rng.standard_normal((11, 2)))
        with pytest.raises(IntervalTooShortError):
            u_profile(X, 4, Interval(1, 7))


class TestNormalizedT:
    def test_falling_factorial(self):
        assert falling_factorial(5.0, 3) == 60.0
        assert falling_factorial(4.0, 0) == 1.0

    def test_estimates_lq_norm(self, rng):
        # at the true split the statistic is unbiased for ||Delta||_q^q;
        # check the normalization against the naive statistic directly
        X = DataMatrix(rng.standard_normal((12, 2)))
        t = normalized_t_stat(X, 2, 6)
        expected = u_stat_naive(X, 2, 6) / (
            falling_factorial(6.0, 2) * falling_factorial(6.0, 2)
        )
        assert rel_close(t, expected)

    def test_split_range(self, rng):
        X = DataMatrix(rng.standard_normal((12, 2)))
        with pytest.raises(InvalidSplitError):
            normalized_t_stat(X, 4, 2)
