"""Change-point location estimation.

``single_cp_estimate`` takes the argmax of the self-normalized ratio over the
trimmed split range.  ``wbs_detect`` and ``wbs_adaptive`` run wild binary
segmentation: a fixed sample of random intervals is drawn once per run, each
recursion level keeps the intervals inside its segment, the best interval
statistic is compared against a simulated threshold (or its Monte-Carlo
p-value against a running level), and detection splits the segment for
further recursion.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .backend import kernels
from .datamodel import DataMatrix, Interval, Segmentation, validate_even_order, validate_qset
from .errors import MissingCalibrationError, NoAdmissibleIntervalError
from .nulldist import KIND_WBS_MAX, NullTable, p_value
from .sntest import Preprocessing, preprocess, sn_statistic


def single_cp_estimate(X: DataMatrix, q: int,
                       prep: Preprocessing = Preprocessing()) -> tuple[int, float]:
    """(k_hat, tau_hat): argmax split of the ratio on (1, n) and its fraction."""
    profile = sn_statistic(X, q, prep=prep)
    k_hat = profile.argmax
    return k_hat, k_hat / X.n


def draw_intervals(n: int, m_intervals: int, min_len: int, seed: int,
                   within: Interval | None = None) -> list[Interval]:
    """Sample intervals uniformly over admissible (s, e) pairs, with replacement.

    Admissible means s, e inside ``within`` with e - s >= min_len.  Uniformity
    over pairs is achieved by decoding a uniform integer through the
    triangular count of admissible ends per start.
    """
    if m_intervals < 1:
        raise ValueError(f"m_intervals must be >= 1, got {m_intervals}")
    within = Interval(1, n) if within is None else within
    if within.e > n:
        raise ValueError(f"interval {within} exceeds n={n}")
    span = within.e - within.s  # max possible e - s
    if span < min_len:
        raise NoAdmissibleIntervalError(
            f"no (s, e) in {within} with e - s >= {min_len}"
        )
    # starts s = within.s + i, i = 0..span-min_len; start i admits
    # span - min_len - i + 1 ends; cumulative counts decode a flat index.
    n_starts = span - min_len + 1
    counts = np.arange(n_starts, 0, -1, dtype=np.int64)
    cum = np.cumsum(counts)
    total = int(cum[-1])
    rng = np.random.default_rng(seed)
    flat = rng.integers(0, total, size=m_intervals)
    out = []
    for f in flat:
        i = int(np.searchsorted(cum, f, side="right"))
        offset = int(f - (cum[i - 1] if i > 0 else 0))
        s = within.s + i
        e = s + min_len + offset
        out.append(Interval(s, e))
    return out


@dataclass(frozen=True)
class WbsConfig:
    """Wild binary segmentation configuration."""

    m_intervals: int = 1000
    min_len: int | None = None  # default 4*q_max - 1
    level: float = 0.95
    calib_reps: int = 200
    interval_seed: int = 0
    calib_seed: int = 1
    p0: float = 0.05  # running level for the adaptive variant
    literal_p_orientation: bool = False


@dataclass(frozen=True)
class BreakRecord:
    """One detected change point and the interval evidence behind it."""

    location: int
    interval: Interval
    q: int
    value: float
    p_value: float | None = None


@dataclass(frozen=True)
class WbsResult:
    breaks: Segmentation
    records: tuple[BreakRecord, ...]
    config: WbsConfig
    threshold: float | None = None


def _interval_table(X: DataMatrix, orders, cfg: WbsConfig,
                    prep: Preprocessing):
    """Evaluate Q and b0 for every sampled interval and order, once per run.

    Returns (intervals, per-q dict of (values, argmax boundaries)).  The
    per-interval statistic depends only on the interval, not on the segment
    currently under recursion, so this is computed a single time.
    """
    q_max = max(orders)
    min_len = cfg.min_len if cfg.min_len is not None else 4 * q_max - 1
    if min_len < 4 * q_max - 1:
        raise ValueError(f"min_len={min_len} < 4*q_max - 1 = {4 * q_max - 1}")
    intervals = draw_intervals(X.n, cfg.m_intervals, min_len, cfg.interval_seed)
    y = np.ascontiguousarray(preprocess(X, prep).values)
    starts = np.array([iv.s - 1 for iv in intervals], dtype=np.int64)
    ends = np.array([iv.e for iv in intervals], dtype=np.int64)
    kern = kernels()
    per_q = {}
    for q in orders:
        vals, args = kern.interval_scan(y, q, starts, ends)
        per_q[q] = (np.asarray(vals), np.asarray(args))
    return intervals, per_q


def _admissible(intervals, seg_s: int, seg_e: int, guard: int) -> list[int]:
    """Indices of sampled intervals inside [seg_s, seg_e] and long enough."""
    return [
        i
        for i, iv in enumerate(intervals)
        if seg_s <= iv.s and iv.e <= seg_e and iv.e - iv.s >= guard
    ]


def _best_interval(vals: np.ndarray, candidates: list[int]) -> int:
    """Candidate index with the largest value; smallest index on ties."""
    best = candidates[0]
    for i in candidates[1:]:
        if vals[i] > vals[best]:
            best = i
    return best


def wbs_detect(X: DataMatrix, q: int, cfg: WbsConfig = WbsConfig(),
               xi: float | None = None,
               prep: Preprocessing = Preprocessing()) -> WbsResult:
    """Wild binary segmentation with a single order q and threshold xi.

    When ``xi`` is None it is simulated at cfg.level from Gaussian data of
    matching shape using the same interval-sampling law.
    """
    q = validate_even_order(q)
    min_len = cfg.min_len if cfg.min_len is not None else 4 * q - 1
    cfg = replace(cfg, min_len=min_len)
    if xi is None:
        from .nulldist import wbs_threshold

        xi = wbs_threshold(
            q,
            X.n,
            min(X.p, 200),
            cfg.m_intervals,
            reps=cfg.calib_reps,
            level=cfg.level,
            seed=cfg.calib_seed,
            intervals_seed=cfg.interval_seed,
            min_len=min_len,
        )
    intervals, per_q = _interval_table(X, (q,), cfg, prep)
    vals, args = per_q[q]
    records: list[BreakRecord] = []

    def recurse(seg_s: int, seg_e: int) -> None:
        if seg_e - seg_s < 4 * q - 1:
            return
        candidates = _admissible(intervals, seg_s, seg_e, 4 * q - 1)
        if not candidates:
            return
        best = _best_interval(vals, candidates)
        if not vals[best] > xi:
            return
        b0 = int(args[best])
        records.append(
            BreakRecord(
                location=b0,
                interval=intervals[best],
                q=q,
                value=float(vals[best]),
            )
        )
        recurse(seg_s, b0)
        recurse(b0 + 1, seg_e)

    recurse(1, X.n)
    records.sort(key=lambda r: r.location)
    return WbsResult(
        breaks=Segmentation(X.n, tuple(r.location for r in records)),
        records=tuple(records),
        config=cfg,
        threshold=float(xi),
    )


def wbs_adaptive(X: DataMatrix, orders, cfg: WbsConfig = WbsConfig(),
                 calibration: dict[int, NullTable] | None = None,
                 prep: Preprocessing = Preprocessing()) -> WbsResult:
    """Adaptive wild binary segmentation over a set of orders.

    Per segment, each order nominates its best interval; the most significant
    Monte-Carlo p-value below the running level cfg.p0 wins (smallest q on
    ties) and locates the break.  Calibration tables must be of kind
    "wbs-max" and share (n, p, M) with the run; missing tables are simulated.
    """
    orders = validate_qset(orders)
    q_max = max(orders)
    min_len = cfg.min_len if cfg.min_len is not None else 4 * q_max - 1
    cfg = replace(cfg, min_len=min_len)
    calibration = dict(calibration) if calibration else {}
    for q in orders:
        if q not in calibration:
            from .nulldist import simulate_null_samples

            calibration[q] = simulate_null_samples(
                q,
                X.n,
                min(X.p, 200),
                cfg.calib_reps,
                cfg.calib_seed,
                kind=KIND_WBS_MAX,
                m_intervals=cfg.m_intervals,
                intervals_seed=cfg.interval_seed,
                min_len=min_len,
            )
        table = calibration[q]
        if table.kind != KIND_WBS_MAX:
            raise MissingCalibrationError(q, f"table kind {table.kind!r} is not wbs-max")
        if (table.n_sim, table.m_intervals) != (X.n, cfg.m_intervals):
            raise MissingCalibrationError(
                q,
                f"table (n={table.n_sim}, M={table.m_intervals}) does not match "
                f"the run (n={X.n}, M={cfg.m_intervals})",
            )
    intervals, per_q = _interval_table(X, orders, cfg, prep)
    records: list[BreakRecord] = []

    def segment_p(q: int, stat: float) -> float:
        draws = calibration[q].draws
        if cfg.literal_p_orientation:
            n_le = int(np.searchsorted(draws, stat, side="right"))
            return (1 + n_le) / (draws.size + 1)
        return p_value(stat, calibration[q])

    def recurse(seg_s: int, seg_e: int) -> None:
        if seg_e - seg_s < 4 * q_max - 1:
            return
        candidates = _admissible(intervals, seg_s, seg_e, 4 * q_max - 1)
        if not candidates:
            return
        best_q = None
        best_p = None
        best_i = None
        for q in orders:
            vals, _ = per_q[q]
            i = _best_interval(vals, candidates)
            pq = segment_p(q, float(vals[i]))
            if pq < cfg.p0 and (best_p is None or pq < best_p):
                best_q, best_p, best_i = q, pq, i
        if best_q is None:
            return
        vals, args = per_q[best_q]
        b0 = int(args[best_i])
        records.append(
            BreakRecord(
                location=b0,
                interval=intervals[best_i],
                q=best_q,
                value=float(vals[best_i]),
                p_value=best_p,
            )
        )
        recurse(seg_s, b0)
        recurse(b0 + 1, seg_e)

    recurse(1, X.n)
    records.sort(key=lambda r: r.location)
    return WbsResult(
        breaks=Segmentation(X.n, tuple(r.location for r in records)),
        records=tuple(records),
        config=cfg,
    )
