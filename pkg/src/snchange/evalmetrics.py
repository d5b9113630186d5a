"""Segmentation accuracy metrics: adjusted Rand index and count MSE."""

from __future__ import annotations

import math

import numpy as np

from .datamodel import Segmentation
from .errors import EmptyListError, LengthMismatchError


def contingency_table(a: Segmentation, b: Segmentation) -> np.ndarray:
    """Counts of time points shared by segment i of a and segment j of b."""
    if a.n != b.n:
        raise LengthMismatchError(f"segmentations cover n={a.n} vs n={b.n}")
    la = a.labels()
    lb = b.labels()
    table = np.zeros((a.n_segments, b.n_segments), dtype=np.int64)
    np.add.at(table, (la, lb), 1)
    return table


def adjusted_rand_index(a: Segmentation, b: Segmentation) -> float:
    """Hubert-Arabie adjusted Rand index of two segmentations of 1..n.

    (Index - E[Index]) / (Max - E[Index]) over pair counts.  Equals 1 when
    the segmentations agree; a trivial (single-segment) partition against a
    nontrivial one scores 0 because the expected index absorbs it.
    """
    table = contingency_table(a, b)
    n = a.n
    sum_ij = sum(math.comb(int(v), 2) for v in table.ravel())
    sum_a = sum(math.comb(int(v), 2) for v in table.sum(axis=1))
    sum_b = sum(math.comb(int(v), 2) for v in table.sum(axis=0))
    total = math.comb(n, 2)
    expected = sum_a * sum_b / total if total else 0.0
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        # both partitions trivial (all pairs together or all apart)
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


def count_mse(estimates: list[Segmentation], truth: Segmentation) -> float:
    """Mean over runs of (estimated break count - true break count)^2."""
    if not estimates:
        raise EmptyListError("count_mse needs at least one estimate")
    true_count = len(truth.breaks)
    return mean([(len(e.breaks) - true_count) ** 2 for e in estimates])


def mean(values) -> float:
    """Plain arithmetic mean (sum / count), the averaging rule for reports."""
    values = list(values)
    if not values:
        raise EmptyListError("mean of an empty list")
    return sum(values) / len(values)
