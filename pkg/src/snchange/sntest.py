"""Self-normalized change-point statistics.

The self-normalizer divides the squared split statistic by sums of squared
subsample statistics computed strictly left and right of the split,

    W(k; s, m) = (1/(m-s+1)) [ sum_{t=s+q-1}^{k-q} U(t; s, k)^2
                             + sum_{t=k+q}^{m-q}  U(t; k+1, m)^2 ],

and the test statistic maximizes U(k; s, m)^2 / W(k; s, m) over the trimmed
split range k = s+2q-1 .. m-2q.  The ratio is invariant under affine maps
X -> cX + 1 b', which the default preprocessing (global centering plus one
pooled scale) exploits purely for numerical stability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .datamodel import DataMatrix, Interval, validate_even_order
from .errors import (
    DegenerateNormalizerError,
    IntervalTooShortError,
    InvalidSplitError,
)
from .ustat import prefix_power_sums


@dataclass(frozen=True)
class Preprocessing:
    """Numerical-stability transform config: center columns, pool one scale."""

    center: bool = True
    scale: bool = True


@dataclass(frozen=True)
class PreprocessResult:
    values: np.ndarray
    column_means: np.ndarray
    scale: float


def preprocess(X: DataMatrix, prep: Preprocessing = Preprocessing()) -> PreprocessResult:
    """Apply centering/scaling; the pooled scale must be strictly positive."""
    vals = X.values
    means = vals.mean(axis=0) if prep.center else np.zeros(X.p)
    out = vals - means if prep.center else vals.copy()
    scale = 1.0
    if prep.scale:
        centered = out if prep.center else out - out.mean(axis=0)
        scale = float(centered.std())
        if scale <= 0.0:
            raise DegenerateNormalizerError("pooled scale is zero (constant data)")
        out = out / scale
    return PreprocessResult(values=out, column_means=means, scale=scale)


@dataclass(frozen=True)
class SnProfile:
    """Per-split U, W and self-normalized ratio over a subsample."""

    q: int
    interval: Interval
    splits: np.ndarray  # 1-based candidate splits k
    u: np.ndarray
    w: np.ndarray
    ratio: np.ndarray
    argmax: int  # 1-based split attaining the max ratio
    value: float


def _ratio_from(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """u^2/w with the conventions w==0 & u==0 -> 0, w==0 & u!=0 -> inf."""
    ratio = np.zeros_like(u)
    pos = w > 0.0
    ratio[pos] = u[pos] ** 2 / w[pos]
    ratio[(~pos) & (u != 0.0)] = np.inf
    return ratio


def self_normalizer(X: DataMatrix, q: int, k: int, s: int = 1,
                    m: int | None = None) -> float:
    """W(k; s, m) on the raw data; error when it vanishes."""
    q = validate_even_order(q)
    m = X.n if m is None else m
    if not (1 <= s <= m <= X.n):
        raise InvalidSplitError(f"(s, m)=({s}, {m}) outside 1..{X.n}")
    if not (s + 2 * q - 1 <= k <= m - 2 * q):
        raise InvalidSplitError(
            f"split k={k} outside the trimmed range [{s + 2 * q - 1}, {m - 2 * q}]"
        )
    pps = prefix_power_sums(X, q)
    kern = kernels()
    kb = k - s + 1  # boundary within the subsample
    a, b = s - 1, m
    left = np.asarray(kern.u_profile(pps.sums, q, a, a + kb))
    right = np.asarray(kern.u_profile(pps.sums, q, a + kb, b))
    w = (float(left @ left) + float(right @ right)) / (m - s + 1)
    if w == 0.0:
        raise DegenerateNormalizerError(f"W(k={k}; {s}, {m}) = 0")
    return w


def sn_statistic(X: DataMatrix, q: int, iv: Interval | None = None,
                 prep: Preprocessing = Preprocessing()) -> SnProfile:
    """Maximal self-normalized ratio over the trimmed splits of an interval."""
    q = validate_even_order(q)
    iv = Interval(1, X.n) if iv is None else iv
    if iv.e > X.n:
        raise IntervalTooShortError(f"interval {iv} exceeds n={X.n}")
    if iv.length < 4 * q:
        raise IntervalTooShortError(f"interval length {iv.length} < 4q = {4 * q}")
    y = preprocess(X, prep).values[iv.s - 1 : iv.e]
    u, w = kernels().sn_profile(np.ascontiguousarray(y), q)
    u = np.asarray(u)
    w = np.asarray(w)
    if not np.any(u) and not np.any(w):
        raise DegenerateNormalizerError("all candidate splits are degenerate")
    ratio = _ratio_from(u, w)
    arg = int(np.argmax(ratio))
    splits = np.arange(iv.s + 2 * q - 1, iv.e - 2 * q + 1)
    return SnProfile(
        q=q,
        interval=iv,
        splits=splits,
        u=u,
        w=w,
        ratio=ratio,
        argmax=int(splits[arg]),
        value=float(ratio[arg]),
    )


def scan_statistic(X: DataMatrix, q: int, stride: int | None = None,
                   prep: Preprocessing = Preprocessing()) -> float:
    """Scan statistic for multiple changes: max forward + max backward ratio.

    Maximizes U(l1; 1, l2)^2/W over growing head intervals and
    U(m2; m1, n)^2/W over shrinking tail intervals and adds the two maxima.
    ``stride`` subsamples the free-endpoint grids (l2 and m1); stride=1 is
    exact.
    """
    q = validate_even_order(q)
    n = X.n
    if n < 4 * q:
        raise IntervalTooShortError(f"n={n} < 4q = {4 * q}")
    if stride is None:
        stride = max(1, n // 100)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    y = np.ascontiguousarray(preprocess(X, prep).values)
    kern = kernels()
    ends = np.unique(np.append(np.arange(4 * q, n + 1, stride, dtype=np.int64), n))
    head_vals, _ = kern.interval_scan(y, q, np.zeros(ends.size, dtype=np.int64), ends)
    starts = np.unique(np.append(np.arange(0, n - 4 * q + 1, stride, dtype=np.int64), 0))
    tail_vals, _ = kern.interval_scan(
        y, q, starts, np.full(starts.size, n, dtype=np.int64)
    )
    return float(np.max(head_vals) + np.max(tail_vals))
