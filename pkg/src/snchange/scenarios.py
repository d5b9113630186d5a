"""Reproducible simulation scenarios emitting table-style reports.

Each scenario bundles a data-generating design, the tests or estimators run
on it, and the metrics reported: rejection rates for the size/power studies,
RMSE of the single change-point location, and MSE/ARI for the wild binary
segmentation studies.  Every random quantity derives from the seeds recorded
in the report, so reruns with the same config reproduce it exactly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .adaptive import adaptive_decision
from .datamodel import DataMatrix, Segmentation, validate_qset
from .errors import UnknownScenarioError
from .estimate import WbsConfig, single_cp_estimate, wbs_adaptive, wbs_detect
from .evalmetrics import adjusted_rand_index, count_mse, mean
from .nulldist import NullTable, p_value, simulate_null_samples, table_quantile
from .simgen import (
    CovarianceSpec,
    MeanShiftSpec,
    apply_mean_shifts,
    first_block_sbm,
    gen_gaussian,
    gen_sbm_series,
    sparse_dense_shift,
    three_break_shifts,
)
from .sntest import sn_statistic

P_SIM_CAP = 200  # calibration dimension cap, keeps tables affordable

DGP_SPECS = {
    "id": CovarianceSpec("identity"),
    "ar0.5": CovarianceSpec("ar", 0.5),
    "ar0.8": CovarianceSpec("ar", 0.8),
    "cs": CovarianceSpec("cs", 0.25),
}


@dataclass(frozen=True)
class RunReport:
    """Machine-readable scenario outcome."""

    scenario: str
    config: dict
    rows: tuple[dict, ...]
    seconds: float

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config": self.config,
            "rows": list(self.rows),
            "timing": {"seconds": self.seconds},
        }


def _data_streams(seed: int, reps: int):
    return np.random.SeedSequence(seed).spawn(reps)


def _q_tables(orders, n, p, null_reps, null_seed, cache_dir=None) -> dict[int, NullTable]:
    return {
        q: simulate_null_samples(q, n, min(p, P_SIM_CAP), null_reps, null_seed,
                                 cache_dir=cache_dir)
        for q in orders
    }


def _rejection_rates(make_data, cfg: dict) -> list[dict]:
    """Shared engine for the size/power scenarios on the single-change test.

    ``make_data`` maps a per-replicate Generator to a DataMatrix.
    """
    orders = validate_qset(cfg["orders"])
    qsets = [validate_qset(s) for s in cfg["qsets"]]
    alpha = cfg["alpha"]
    tables = _q_tables(orders, cfg["n"], cfg["p"], cfg["null_reps"],
                       cfg["null_seed"], cfg.get("cache_dir"))
    reps = cfg["reps"]
    rej_q = {q: 0 for q in orders}
    rej_set = {s: 0 for s in qsets}
    for ss in _data_streams(cfg["seed"], reps):
        X = make_data(np.random.default_rng(ss))
        pvals = {q: p_value(sn_statistic(X, q).value, tables[q]) for q in orders}
        for q in orders:
            rej_q[q] += pvals[q] <= alpha
        for s in qsets:
            rej_set[s] += adaptive_decision(s, pvals, alpha).reject
    rows = [
        {"test": f"q={q}", "rejection_rate": rej_q[q] / reps} for q in orders
    ]
    rows += [
        {"test": "adaptive " + ",".join(map(str, s)), "rejection_rate": rej_set[s] / reps}
        for s in qsets
    ]
    return rows


def _run_table1(cfg: dict) -> list[dict]:
    cov = DGP_SPECS[cfg["dgp"]]

    def make(rng):
        return DataMatrix(_gaussian_rows(rng, cfg["n"], cfg["p"], cov))

    return _rejection_rates(make, cfg)


def _run_table2(cfg: dict) -> list[dict]:
    cov = DGP_SPECS[cfg["dgp"]]
    n, p = cfg["n"], cfg["p"]
    d = 3 if cfg["alternative"] == "sparse" else p
    delta = sparse_dense_shift(p, d, cfg["delta"])
    shift = MeanShiftSpec(((n // 2, delta),))

    def make(rng):
        X = DataMatrix(_gaussian_rows(rng, n, p, cov))
        return apply_mean_shifts(X, shift)

    return _rejection_rates(make, cfg)


def _run_table3(cfg: dict) -> list[dict]:
    cov = DGP_SPECS[cfg["dgp"]]
    n, p = cfg["n"], cfg["p"]
    d = 3 if cfg["alternative"] == "sparse" else p
    delta = sparse_dense_shift(p, d, cfg["delta"])
    shift = MeanShiftSpec(((n // 2, delta),))
    tau_true = (n // 2) / n
    rows = []
    for q in validate_qset(cfg["orders"]):
        sq_errors = []
        for ss in _data_streams(cfg["seed"], cfg["reps"]):
            X = apply_mean_shifts(
                DataMatrix(_gaussian_rows(np.random.default_rng(ss), n, p, cov)),
                shift,
            )
            _, tau_hat = single_cp_estimate(X, q)
            sq_errors.append((tau_hat - tau_true) ** 2)
        rows.append({"test": f"SN({q})", "rmse_x1000": 1000.0 * mean(sq_errors) ** 0.5})
    return rows


TABLE4_DESIGNS = {
    # (k1, d1, k2, d2): magnitude and support of the three mean jumps
    "sparse2.5": (2.5, 5, 2.5, 5),
    "sparse4": (4.0, 5, 4.0, 5),
    "dense2.5": (2.5, 50, 2.5, 50),
    "dense4": (4.0, 50, 4.0, 50),
    "mixed": (2.5, 5, 4.0, 50),
}


def _run_table4(cfg: dict) -> list[dict]:
    n, p = cfg["n"], cfg["p"]
    k1, d1, k2, d2 = TABLE4_DESIGNS[cfg["design"]]
    d1, d2 = min(d1, p), min(d2, p)
    shift = three_break_shifts(p, k1, d1, k2, d2, tuple(cfg["breaks"]))
    truth = Segmentation(n, tuple(cfg["breaks"]))
    orders = validate_qset(cfg["orders"])
    run_one = _wbs_runner(orders, n, p, cfg)
    return _wbs_metrics(
        lambda rng: apply_mean_shifts(DataMatrix(rng.standard_normal((n, p))), shift),
        run_one,
        truth,
        cfg,
        label="WBS-SN(" + ",".join(map(str, orders)) + ")",
    )


def _wbs_runner(orders, n, p, cfg):
    """Build a per-replicate WBS call with calibration simulated only once."""
    min_len = cfg.get("min_len") or 4 * max(orders) - 1
    wcfg = WbsConfig(
        m_intervals=cfg["m_intervals"],
        min_len=min_len,
        level=cfg["level"],
        calib_reps=cfg["calib_reps"],
        interval_seed=cfg["interval_seed"],
        calib_seed=cfg["null_seed"],
    )
    tables = {
        q: simulate_null_samples(
            q, n, min(p, P_SIM_CAP), cfg["calib_reps"], cfg["null_seed"],
            kind="wbs-max", m_intervals=cfg["m_intervals"],
            intervals_seed=cfg["interval_seed"], min_len=min_len,
            cache_dir=cfg.get("cache_dir"),
        )
        for q in orders
    }
    if len(orders) == 1:
        q = orders[0]
        xi = table_quantile(tables[q], cfg["level"])
        return lambda X: wbs_detect(X, q, wcfg, xi=xi)
    return lambda X: wbs_adaptive(X, orders, wcfg, calibration=tables)


def _wbs_metrics(make_data, run_one, truth, cfg, label) -> list[dict]:
    estimates = []
    aris = []
    for ss in _data_streams(cfg["seed"], cfg["reps"]):
        X = make_data(np.random.default_rng(ss))
        result = run_one(X)
        estimates.append(result.breaks)
        aris.append(adjusted_rand_index(result.breaks, truth))
    return [
        {
            "test": label,
            "mse": count_mse(estimates, truth),
            "ari": mean(aris),
        }
    ]


def _gaussian_rows(rng, n, p, cov: CovarianceSpec) -> np.ndarray:
    """Same covariance constructions as gen_gaussian, on a live Generator."""
    z = rng.standard_normal((n, p))
    if cov.kind == "identity":
        return z
    if cov.kind == "ar":
        rho = cov.rho
        out = np.empty_like(z)
        out[:, 0] = z[:, 0]
        scale = (1.0 - rho * rho) ** 0.5
        for j in range(1, p):
            out[:, j] = rho * out[:, j - 1] + scale * z[:, j]
        return out
    w = rng.standard_normal((n, 1))
    return (1.0 - cov.rho) ** 0.5 * z + cov.rho**0.5 * w


def _sbm_rows(rng, n, spec, mus) -> DataMatrix:
    base = spec.base_means()
    rows, cols = np.triu_indices(spec.m, 1)
    means = np.asarray(mus)[:, None] * base[rows, cols][None, :]
    return DataMatrix((rng.random(means.shape) < means).astype(np.float64))


def _base_intensity(cfg: dict) -> float:
    """mu_t baseline; the studies use mu = 0.1/c unless overridden."""
    return cfg["mu"] if cfg["mu"] is not None else 0.1 / cfg["c"]


def _run_network_size(cfg: dict) -> list[dict]:
    spec = first_block_sbm(cfg["m"], cfg["c"])
    mus = np.full(cfg["n"], _base_intensity(cfg))
    cfg = dict(cfg, p=spec.m * (spec.m - 1) // 2)
    return _rejection_rates(lambda rng: _sbm_rows(rng, cfg["n"], spec, mus), cfg)


def _run_network_power(cfg: dict) -> list[dict]:
    spec = first_block_sbm(cfg["m"], cfg["c"])
    n = cfg["n"]
    mu = _base_intensity(cfg)
    mus = mu * (1.0 + cfg["delta"] * (np.arange(1, n + 1) > n // 2))
    cfg = dict(cfg, p=spec.m * (spec.m - 1) // 2)
    return _rejection_rates(lambda rng: _sbm_rows(rng, n, spec, mus), cfg)


def _run_network_wbs(cfg: dict) -> list[dict]:
    spec = first_block_sbm(cfg["m"], cfg["c"])
    n = cfg["n"]
    breaks = tuple(cfg["breaks"])
    t = np.arange(1, n + 1)
    bumps = ((t > breaks[0]) & (t <= breaks[1])) | (t > breaks[2])
    mus = cfg["mu"] * (1.0 + cfg["delta"] * bumps)
    truth = Segmentation(n, breaks)
    orders = validate_qset(cfg["orders"])
    p = spec.m * (spec.m - 1) // 2
    run_one = _wbs_runner(orders, n, p, cfg)
    return _wbs_metrics(
        lambda rng: _sbm_rows(rng, n, spec, mus),
        run_one,
        truth,
        cfg,
        label="WBS-SN(" + ",".join(map(str, orders)) + ")",
    )


_REGISTRY = {
    "table1-size": (
        _run_table1,
        {
            "dgp": "id", "n": 200, "p": 100, "orders": (2, 4, 6),
            "qsets": ((2, 4), (2, 6), (2, 4, 6)), "alpha": 0.05,
            "reps": 2000, "null_reps": 2000, "seed": 0, "null_seed": 1,
        },
    ),
    "table2-power": (
        _run_table2,
        {
            "dgp": "id", "n": 200, "p": 100, "alternative": "sparse",
            "delta": 1.0, "orders": (2, 4, 6),
            "qsets": ((2, 4), (2, 6), (2, 4, 6)), "alpha": 0.05,
            "reps": 2000, "null_reps": 2000, "seed": 0, "null_seed": 1,
        },
    ),
    "table3-rmse": (
        _run_table3,
        {
            "dgp": "id", "n": 200, "p": 100, "alternative": "dense",
            "delta": 2.0, "orders": (2, 4, 6), "reps": 500, "seed": 0,
        },
    ),
    "table4-wbs": (
        _run_table4,
        {
            "design": "sparse4", "n": 120, "p": 50, "breaks": (30, 60, 90),
            "orders": (6,), "m_intervals": 1000, "min_len": None,
            "level": 0.95, "calib_reps": 200, "reps": 100, "seed": 0,
            "null_seed": 1, "interval_seed": 2,
        },
    ),
    "network-size": (
        _run_network_size,
        {
            "n": 200, "m": 10, "c": 1.0, "mu": None, "orders": (2, 4, 6),
            "qsets": ((2, 4), (2, 6)), "alpha": 0.05,
            "reps": 1000, "null_reps": 2000, "seed": 0, "null_seed": 1,
        },
    ),
    "network-power": (
        _run_network_power,
        {
            "n": 200, "m": 10, "c": 1.0, "mu": None, "delta": 0.5,
            "orders": (2, 4, 6), "qsets": ((2, 4), (2, 6)), "alpha": 0.05,
            "reps": 1000, "null_reps": 2000, "seed": 0, "null_seed": 1,
        },
    ),
    "network-wbs": (
        _run_network_wbs,
        {
            "n": 120, "m": 10, "c": 1.0, "mu": 0.2, "delta": 1.0,
            "breaks": (30, 60, 90), "orders": (2,), "m_intervals": 1000,
            "min_len": 20, "level": 0.95, "calib_reps": 200, "reps": 100,
            "seed": 0, "null_seed": 1, "interval_seed": 2,
        },
    ),
}


def scenario_names() -> tuple[str, ...]:
    return tuple(_REGISTRY)


def run_scenario(name: str, overrides: dict | None = None) -> RunReport:
    """Run a registered scenario; overrides replace registered defaults."""
    if name not in _REGISTRY:
        raise UnknownScenarioError(
            f"unknown scenario {name!r}; choose from {sorted(_REGISTRY)}"
        )
    runner, defaults = _REGISTRY[name]
    cfg = dict(defaults)
    if overrides:
        unknown = set(overrides) - set(defaults) - {"cache_dir"}
        if unknown:
            raise UnknownScenarioError(
                f"unknown overrides for {name!r}: {sorted(unknown)}"
            )
        cfg.update(overrides)
    start = time.perf_counter()
    rows = runner(cfg)
    elapsed = time.perf_counter() - start
    config = {k: _jsonable(v) for k, v in cfg.items()}
    return RunReport(scenario=name, config=config, rows=tuple(rows), seconds=elapsed)


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v
