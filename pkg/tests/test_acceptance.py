"""End-to-end acceptance suite.

Each test prints exactly one "CRITERION k: PASS/FAIL" line summarizing the
check before asserting.  Monte-Carlo null tables are cached in a shared
module-scoped directory so criteria with matching calibration parameters
reuse each other's draws.
"""

import os
import sys
import time
from itertools import combinations

import numpy as np
import pytest
from scipy import stats as sps

from snchange.adaptive import combine_p_values, per_q_level
from snchange.datamodel import DataMatrix, Segmentation
from snchange.estimate import WbsConfig, wbs_detect
from snchange.evalmetrics import adjusted_rand_index
from snchange.nulldist import CACHE_ENV_VAR, NullTable, p_value, simulate_null_samples
from snchange.scenarios import run_scenario
from snchange.simgen import first_block_sbm, gen_sbm_series
from snchange.sntest import sn_statistic
from snchange.ustat import u_stat, u_stat_naive


@pytest.fixture(scope="module", autouse=True)
def shared_cache(tmp_path_factory):
    path = tmp_path_factory.mktemp("nullcache")
    old = os.environ.get(CACHE_ENV_VAR)
    os.environ[CACHE_ENV_VAR] = str(path)
    yield str(path)
    if old is None:
        os.environ.pop(CACHE_ENV_VAR, None)
    else:
        os.environ[CACHE_ENV_VAR] = old


def _criterion(num: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {num}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    sys.stdout.flush()
    assert ok, line


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def test_criterion_1_oracle_equivalence():
    """Fast closed-form statistic equals brute-force tuple enumeration."""
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    for _ in range(200):
        q = int(rng.choice([2, 4]))
        # the oracle enumerates P(side, q)^2 tuples, so keep q=4 sides small
        n = int(rng.integers(6, 13)) if q == 2 else int(rng.integers(8, 11))
        p = int(rng.integers(1, 6))
        X = DataMatrix(rng.standard_normal((n, p)))
        for s in range(1, n):
            for m in range(s + 2 * q - 1, n + 1):
                for k in range(s + q - 1, m - q + 1):
                    fast = u_stat(X, q, k, s, m)
                    slow = u_stat_naive(X, q, k, s, m)
                    worst = max(worst, _rel_err(fast, slow))
                    checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 60.0
    _criterion(1, ok, f"{checked} splits, worst rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_invariances():
    """Affine/permutation/reversal/homogeneity invariances of the statistics."""
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    worst = 0.0
    wbs_mismatches = 0
    for _ in range(100):
        q = int(rng.choice([2, 4]))
        n = int(rng.integers(4 * q + 4, 41))
        p = int(rng.integers(2, 6))
        X = DataMatrix(rng.standard_normal((n, p)))
        a = float(rng.uniform(0.5, 3.0))
        b = float(rng.uniform(-2.0, 2.0))
        Y = DataMatrix(a * X.values + b)
        k = int(rng.integers(2 * q, n - 2 * q + 1))

        t_x = sn_statistic(X, q).value
        worst = max(worst, _rel_err(t_x, sn_statistic(Y, q).value))
        perm = rng.permutation(p)
        worst = max(worst, _rel_err(t_x, sn_statistic(DataMatrix(X.values[:, perm]), q).value))
        u = u_stat(X, q, k)
        worst = max(worst, _rel_err(u, u_stat(DataMatrix(X.values[::-1].copy()), q, n - k)))
        worst = max(worst, _rel_err(a**q * u, u_stat(DataMatrix(a * X.values), q, k)))

        cfg = WbsConfig(m_intervals=30, min_len=4 * q + 3, interval_seed=7)
        same = wbs_detect(X, q, cfg, xi=8.0).breaks == wbs_detect(Y, q, cfg, xi=8.0).breaks
        wbs_mismatches += not same
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and wbs_mismatches == 0 and elapsed < 60.0
    _criterion(2, ok, f"worst rel err {worst:.2e}, "
                      f"{wbs_mismatches} segmentation mismatches, {elapsed:.1f}s")


def test_criterion_3_null_size():
    rep = run_scenario("table1-size", {
        "orders": (2,), "qsets": ((2,),), "reps": 500,
    })
    size = next(r["rejection_rate"] for r in rep.rows if r["test"] == "q=2")
    ok = 0.01 <= size <= 0.06
    _criterion(3, ok, f"empirical size {size:.3f} in [0.01, 0.06], "
                      f"{rep.seconds:.0f}s")


def test_criterion_4_power_ordering():
    reference = {
        "sparse": {"q=2": 0.742, "q=6": 0.962, "adaptive 2,6": 0.967},
        "dense": {"q=2": 0.718, "q=6": 0.292, "adaptive 2,6": 0.661},
    }
    powers = {}
    for alt in ("sparse", "dense"):
        # 500 replications keep the Monte-Carlo error on the power gaps
        # well below the 0.1 tolerance checked against the references
        rep = run_scenario("table2-power", {
            "alternative": alt, "delta": 1.0, "orders": (2, 6),
            "qsets": ((2, 6),), "reps": 500,
        })
        powers[alt] = {r["test"]: r["rejection_rate"] for r in rep.rows}
    ordering = (powers["sparse"]["q=6"] > powers["sparse"]["q=2"]
                and powers["dense"]["q=2"] > powers["dense"]["q=6"])
    close = all(
        abs(powers[alt][test] - ref) <= 0.1
        for alt, refs in reference.items()
        for test, ref in refs.items()
    )
    adaptive_near_max = all(
        powers[alt]["adaptive 2,6"] >= max(powers[alt]["q=2"], powers[alt]["q=6"]) - 0.1
        for alt in ("sparse", "dense")
    )
    ok = ordering and close and adaptive_near_max
    _criterion(4, ok, f"sparse {powers['sparse']}, dense {powers['dense']}")


def test_criterion_5_single_cp_rmse():
    rep = run_scenario("table3-rmse", {"orders": (2,), "reps": 300})
    rmse = rep.rows[0]["rmse_x1000"]
    ok = 15.0 <= rmse <= 45.0
    _criterion(5, ok, f"location RMSE x1000 = {rmse:.1f} in [15, 45]")


def test_criterion_6_wbs_recovery():
    sparse = run_scenario("table4-wbs", {
        "design": "sparse4", "orders": (6,), "reps": 50, "calib_reps": 100,
    }).rows[0]
    mixed = run_scenario("table4-wbs", {
        "design": "mixed", "orders": (2, 6), "reps": 50, "calib_reps": 100,
    }).rows[0]
    ok = sparse["mse"] <= 0.3 and sparse["ari"] >= 0.90 and mixed["ari"] >= 0.85
    _criterion(6, ok, f"sparse mse {sparse['mse']:.3f} ari {sparse['ari']:.3f}; "
                      f"mixed ari {mixed['ari']:.3f}")


def brute_force_ari(a: Segmentation, b: Segmentation) -> float:
    la, lb = a.labels(), b.labels()
    together_a = together_b = both = total = 0
    for i, j in combinations(range(a.n), 2):
        total += 1
        sa = la[i] == la[j]
        sb = lb[i] == lb[j]
        together_a += sa
        together_b += sb
        both += sa and sb
    expected = together_a * together_b / total
    max_index = (together_a + together_b) / 2
    if max_index == expected:
        return 1.0
    return (both - expected) / (max_index - expected)


def test_criterion_7_exact_arithmetic():
    start = time.perf_counter()
    # adjusted-p route vs per-order-level route on random p-vectors
    rng = np.random.default_rng(707)
    alpha = 0.05
    disagreements = 0
    all_orders = (2, 4, 6)
    for _ in range(10_000):
        k = int(rng.integers(1, 4))
        orders = tuple(sorted(rng.choice(all_orders, size=k, replace=False)))
        p = {int(q): float(rng.uniform(1e-6, 1.0)) for q in orders}
        _, p_adj = combine_p_values(orders, p)
        via_adjusted = p_adj <= alpha
        via_per_q = any(pq <= per_q_level(alpha, k) for pq in p.values())
        disagreements += via_adjusted != via_per_q

    # pair-counting oracle over every segmentation pair for small n
    ari_worst = 0.0
    for n in range(2, 9):
        segs = [Segmentation(n, bs)
                for r in range(n)
                for bs in combinations(range(1, n), r)]
        for a in segs:
            for b in segs:
                ari_worst = max(
                    ari_worst,
                    abs(adjusted_rand_index(a, b) - brute_force_ari(a, b)),
                )

    # add-one p-value boundary cases
    table = NullTable(kind="single", q=2, n_sim=10, p_sim=2, reps=3,
                      seed=0, draws=np.array([1.0, 2.0, 3.0]))
    boundaries = (
        p_value(4.0, table) == 1 / 4
        and p_value(0.0, table) == 1.0
        and p_value(2.0, table) == 3 / 4  # ties count as exceedances
    )
    elapsed = time.perf_counter() - start
    ok = disagreements == 0 and ari_worst <= 1e-12 and boundaries and elapsed < 60.0
    _criterion(7, ok, f"{disagreements} route disagreements, "
                      f"ARI max abs err {ari_worst:.1e}, boundaries {boundaries}")


def test_criterion_8_calibration_self_consistency():
    t1 = simulate_null_samples(2, 200, 50, 2000, seed=100)
    t2 = simulate_null_samples(2, 200, 50, 2000, seed=200)
    ks_pvalue = sps.ks_2samp(t1.draws, t2.draws).pvalue
    pvals = np.array([p_value(x, t1) for x in t2.draws])
    uniform_dist = sps.kstest(pvals, "uniform").statistic
    ok = ks_pvalue > 0.01 and uniform_dist <= 0.05
    _criterion(8, ok, f"two-sample KS p = {ks_pvalue:.3f}, "
                      f"p-value uniformity distance {uniform_dist:.3f}")


def test_criterion_9_network():
    # edge frequencies match the block means within 4 binomial SEs
    spec = first_block_sbm(10, 0.5)
    mu, n = 0.3, 5000
    X = gen_sbm_series(n, spec, mu, seed=900)
    rows, cols = np.triu_indices(10, 1)
    target = mu * spec.base_means()[rows, cols]
    se = np.sqrt(target * (1 - target) / n)
    gaps = np.abs(X.values.mean(axis=0) - target)
    moments_ok = bool(np.all(gaps <= 4 * se + 1e-12))

    rep = run_scenario("network-size", {
        "orders": (2,), "qsets": ((2,),), "reps": 300,
    })
    size = next(r["rejection_rate"] for r in rep.rows if r["test"] == "q=2")
    ok = moments_ok and 0.01 <= size <= 0.07
    _criterion(9, ok, f"moments within 4 SE: {moments_ok}, "
                      f"network size {size:.3f} in [0.01, 0.07]")
