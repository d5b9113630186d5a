"""Monte-Carlo calibration of the pivotal null distribution.

The limiting null law of the self-normalized statistic is free of nuisance
parameters, so critical values and p-values come from simulating the
finite-sample statistic on i.i.d. standard Gaussian panels of matching shape.
The same recipe yields the wild-binary-segmentation threshold: simulate the
max of the interval statistic over a fixed random interval sample and take a
high quantile.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datamodel import DataMatrix, validate_even_order
from .errors import (
    BudgetExceededError,
    EmptyTableError,
    IntervalTooShortError,
)
from .sntest import Preprocessing, sn_statistic, preprocess

CACHE_ENV_VAR = "SNCHANGE_CACHE_DIR"

KIND_SINGLE = "single"
KIND_WBS_MAX = "wbs-max"

DEFAULT_SINGLE_REPS = 2000
DEFAULT_WBS_REPS = 200

# projected work limit in (reps * n^2 * p * q) units; ~hours of compute
DEFAULT_WORK_BUDGET = 5e13


@dataclass(frozen=True)
class NullTable:
    """Sorted Monte-Carlo draws of a null statistic plus provenance."""

    kind: str
    q: int
    n_sim: int
    p_sim: int
    reps: int
    seed: int
    draws: np.ndarray
    m_intervals: int | None = None
    intervals_seed: int | None = None
    min_len: int | None = None

    def __post_init__(self):
        draws = np.sort(np.asarray(self.draws, dtype=np.float64))
        if draws.size < 1:
            raise EmptyTableError("a null table needs at least one draw")
        if not np.all(np.isfinite(draws)) or np.any(draws < 0):
            raise ValueError("null draws must be finite and nonnegative")
        draws.setflags(write=False)
        object.__setattr__(self, "draws", draws)


def _replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one replicate; deterministic in (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(index + 1)[index])


def _replicate_streams(seed: int, reps: int):
    children = np.random.SeedSequence(seed).spawn(reps)
    return [np.random.default_rng(c) for c in children]


def simulate_null_samples(
    q: int,
    n_sim: int,
    p_sim: int,
    reps: int,
    seed: int,
    kind: str = KIND_SINGLE,
    m_intervals: int | None = None,
    intervals_seed: int | None = None,
    min_len: int | None = None,
    prep: Preprocessing = Preprocessing(),
    cache_dir: str | os.PathLike | None = None,
    work_budget: float = DEFAULT_WORK_BUDGET,
) -> NullTable:
    """Simulate the null law of the statistic on Gaussian panels.

    kind="single": draws of the full-sample self-normalized statistic.
    kind="wbs-max": draws of max_m Q(s_m, e_m) over one fixed interval sample
    of size ``m_intervals`` (drawn once from ``intervals_seed`` and reused
    across all replicates).
    """
    q = validate_even_order(q)
    if kind not in (KIND_SINGLE, KIND_WBS_MAX):
        raise ValueError(f"unknown table kind {kind!r}")
    if n_sim < 4 * q:
        raise IntervalTooShortError(f"n_sim={n_sim} < 4q = {4 * q}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if kind == KIND_WBS_MAX:
        if m_intervals is None or m_intervals < 1:
            raise ValueError("kind='wbs-max' needs m_intervals >= 1")
        if intervals_seed is None:
            intervals_seed = seed
        if min_len is None:
            min_len = 4 * q - 1
    work = float(reps) * n_sim * n_sim * p_sim * q
    if kind == KIND_WBS_MAX:
        work *= max(1, m_intervals) / max(1, n_sim // 3)
    if work > work_budget:
        raise BudgetExceededError(
            f"projected work {work:.2e} exceeds the budget {work_budget:.2e}"
        )

    cache_path = _cache_path(
        cache_dir, kind, q, n_sim, p_sim, reps, seed, m_intervals, intervals_seed, min_len
    )
    if cache_path is not None and cache_path.exists():
        return load_null_table(cache_path)

    intervals = None
    if kind == KIND_WBS_MAX:
        from .estimate import draw_intervals  # local import to avoid a cycle

        intervals = draw_intervals(n_sim, m_intervals, min_len, intervals_seed)
        starts = np.array([iv.s - 1 for iv in intervals], dtype=np.int64)
        ends = np.array([iv.e for iv in intervals], dtype=np.int64)

    from .backend import kernels

    kern = kernels()
    draws = np.empty(reps)
    for i, rng in enumerate(_replicate_streams(seed, reps)):
        data = rng.standard_normal((n_sim, p_sim))
        X = DataMatrix(data)
        if kind == KIND_SINGLE:
            draws[i] = sn_statistic(X, q, prep=prep).value
        else:
            y = np.ascontiguousarray(preprocess(X, prep).values)
            vals, _ = kern.interval_scan(y, q, starts, ends)
            draws[i] = float(np.max(vals))

    table = NullTable(
        kind=kind,
        q=q,
        n_sim=n_sim,
        p_sim=p_sim,
        reps=reps,
        seed=seed,
        draws=draws,
        m_intervals=m_intervals,
        intervals_seed=intervals_seed,
        min_len=min_len,
    )
    if cache_path is not None:
        save_null_table(table, cache_path)
    return table


def p_value(stat: float, table: NullTable) -> float:
    """Add-one Monte-Carlo p-value: (1 + #{draws >= stat}) / (R + 1)."""
    draws = table.draws
    if draws.size == 0:
        raise EmptyTableError("empty null table")
    n_ge = draws.size - int(np.searchsorted(draws, stat, side="left"))
    return (1 + n_ge) / (draws.size + 1)


def table_quantile(table: NullTable, level: float) -> float:
    """The ceil(level * R)-th order statistic of the draws."""
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must be in (0, 1), got {level}")
    r = table.draws.size
    idx = max(1, math.ceil(level * r))
    return float(table.draws[idx - 1])


def wbs_threshold(
    q: int,
    n: int,
    p: int,
    m_intervals: int,
    reps: int = DEFAULT_WBS_REPS,
    level: float = 0.95,
    seed: int = 0,
    intervals_seed: int | None = None,
    min_len: int | None = None,
    cache_dir=None,
) -> float:
    """Level-quantile of the simulated max-over-intervals statistic."""
    table = simulate_null_samples(
        q,
        n,
        p,
        reps,
        seed,
        kind=KIND_WBS_MAX,
        m_intervals=m_intervals,
        intervals_seed=intervals_seed,
        min_len=min_len,
        cache_dir=cache_dir,
    )
    return table_quantile(table, level)


def _cache_path(cache_dir, kind, q, n, p, reps, seed, m, iseed, min_len) -> Path | None:
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV_VAR) or None
    if cache_dir is None:
        return None
    name = f"{kind}_q{q}_n{n}_p{p}_R{reps}_seed{seed}"
    if kind == KIND_WBS_MAX:
        name += f"_M{m}_iseed{iseed}_ml{min_len}"
    path = Path(cache_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / (name + ".json")


def save_null_table(table: NullTable, path: str | os.PathLike) -> None:
    """Write a table as JSON with draws at full double precision."""
    meta = {
        "kind": table.kind,
        "q": table.q,
        "n_sim": table.n_sim,
        "p_sim": table.p_sim,
        "R": table.reps,
        "seed": table.seed,
    }
    if table.kind == KIND_WBS_MAX:
        meta["M"] = table.m_intervals
        meta["intervals_seed"] = table.intervals_seed
        meta["min_len"] = table.min_len
    parts = [json.dumps(meta, sort_keys=True)[:-1]]  # drop closing brace
    draws = ", ".join(format(x, ".17g") for x in table.draws)
    parts.append(f', "draws": [{draws}]}}')
    Path(path).write_text("".join(parts), encoding="utf-8")


def load_null_table(path: str | os.PathLike) -> NullTable:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    return NullTable(
        kind=obj["kind"],
        q=obj["q"],
        n_sim=obj["n_sim"],
        p_sim=obj["p_sim"],
        reps=obj["R"],
        seed=obj["seed"],
        draws=np.asarray(obj["draws"], dtype=np.float64),
        m_intervals=obj.get("M"),
        intervals_seed=obj.get("intervals_seed"),
        min_len=obj.get("min_len"),
    )
