"""Command-line interface: test, estimate, calibrate, simulate, network.

Reports are JSON on stdout by default (canonical form: sorted keys, fixed
separators) with a --csv alternative for tabular rows.  Exit codes: 0 the
command ran (no rejection), 2 the test rejected (for scripting), greater
than 2 on errors.  Every random quantity is seeded; omitted seeds are
sampled and printed so the run can be reproduced.
"""

from __future__ import annotations

import csv
import io
import json
import sys
import time

import click
import numpy as np

from .adaptive import adaptive_decision
from .datamodel import DataMatrix, load_csv_matrix, validate_qset
from .errors import ChangePointError
from .estimate import WbsConfig, single_cp_estimate, wbs_adaptive, wbs_detect
from .nulldist import (
    KIND_SINGLE,
    KIND_WBS_MAX,
    p_value,
    save_null_table,
    simulate_null_samples,
)
from .scenarios import run_scenario, scenario_names
from .simgen import vech
from .sntest import scan_statistic, sn_statistic

EXIT_REJECT = 2
EXIT_ERROR = 4

# reserve exit code 2 for the rejection decision
click.UsageError.exit_code = 3


def _emit(report: dict, as_csv: bool) -> None:
    if as_csv:
        rows = report.get("rows") or [report.get("results", report)]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=sorted({k for r in rows for k in r}))
        writer.writeheader()
        for r in rows:
            writer.writerow(r)
        click.echo(buf.getvalue(), nl=False)
    else:
        click.echo(json.dumps(report, sort_keys=True, separators=(",", ": ")))


def _ensure_seed(seed: int | None, label: str) -> int:
    if seed is not None:
        return seed
    seed = int(np.random.SeedSequence().generate_state(1)[0])
    click.echo(f"{label} not given, sampled: {seed}", err=True)
    return seed


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(EXIT_ERROR)


@click.group()
@click.option("--threads", type=int, default=None,
              help="Cap the numba worker count for parallel kernels.")
def main(threads):
    """Change-point testing and estimation for high-dimensional panels."""
    if threads is not None:
        try:
            import numba

            numba.set_num_threads(threads)
        except ImportError:
            pass


def _run_test(X: DataMatrix, orders, alpha, null_reps, null_seed, scan):
    orders = validate_qset(orders)
    stats = {}
    pvals = {}
    for q in orders:
        stat = scan_statistic(X, q) if scan else sn_statistic(X, q).value
        table = simulate_null_samples(q, X.n, min(X.p, 200), null_reps, null_seed)
        stats[q] = stat
        pvals[q] = p_value(stat, table)
    decision = adaptive_decision(orders, pvals, alpha, stats=stats)
    results = {
        "per_q": {
            str(q): {"statistic": stats[q], "p_value": pvals[q]} for q in orders
        },
        "p_ada": decision.p_ada,
        "p_adjusted": decision.p_adjusted,
        "reject": decision.reject,
    }
    rows = [
        {"q": q, "statistic": stats[q], "p_value": pvals[q]} for q in orders
    ]
    rows.append({"q": "adaptive", "statistic": None, "p_value": decision.p_adjusted})
    return results, rows, decision.reject


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--q", "orders", type=int, multiple=True, default=(2, 6),
              show_default=True, help="Orders to test; repeat for several.")
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--null-reps", type=int, default=2000, show_default=True)
@click.option("--null-seed", type=int, default=None)
@click.option("--scan/--single", default=False,
              help="Scan statistic for multiple changes vs the single-change test.")
@click.option("--header/--no-header", default=False)
@click.option("--csv", "as_csv", is_flag=True, default=False)
def test(path, orders, alpha, null_reps, null_seed, scan, header, as_csv):
    """Run the (adaptive) change-point test on a CSV panel."""
    start = time.perf_counter()
    null_seed = _ensure_seed(null_seed, "--null-seed")
    try:
        X = load_csv_matrix(path, has_header=header)
        results, rows, reject = _run_test(X, orders, alpha, null_reps, null_seed, scan)
    except (ChangePointError, ValueError, OSError) as exc:
        _fail(exc)
    report = {
        "command": "test",
        "config": {
            "path": path, "orders": sorted(set(orders)), "alpha": alpha,
            "null_reps": null_reps, "null_seed": null_seed, "scan": scan,
            "n": X.n, "p": X.p, "names": list(X.names) if X.names else None,
        },
        "results": results,
        "rows": rows,
        "timing": {"seconds": time.perf_counter() - start},
    }
    _emit(report, as_csv)
    sys.exit(EXIT_REJECT if reject else 0)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["single", "wbs"]), default="single",
              show_default=True)
@click.option("--q", "orders", type=int, multiple=True, default=(2,),
              show_default=True)
@click.option("--intervals", "m_intervals", type=int, default=1000, show_default=True)
@click.option("--min-len", type=int, default=None,
              help="Minimum interval length; default 4*max(q) - 1.")
@click.option("--threshold-level", type=float, default=0.95, show_default=True)
@click.option("--calib-reps", type=int, default=200, show_default=True)
@click.option("--calib-seed", type=int, default=None)
@click.option("--interval-seed", type=int, default=None)
@click.option("--header/--no-header", default=False)
@click.option("--csv", "as_csv", is_flag=True, default=False)
def estimate(path, method, orders, m_intervals, min_len, threshold_level,
             calib_reps, calib_seed, interval_seed, header, as_csv):
    """Estimate change-point locations (single argmax or WBS)."""
    start = time.perf_counter()
    try:
        X = load_csv_matrix(path, has_header=header)
        orders = validate_qset(orders)
        if method == "single":
            k_hat, tau_hat = single_cp_estimate(X, orders[0])
            results = {"breaks": [k_hat], "tau": tau_hat}
            config = {"path": path, "method": method, "orders": list(orders)}
        else:
            calib_seed = _ensure_seed(calib_seed, "--calib-seed")
            interval_seed = _ensure_seed(interval_seed, "--interval-seed")
            cfg = WbsConfig(
                m_intervals=m_intervals,
                min_len=min_len,
                level=threshold_level,
                calib_reps=calib_reps,
                interval_seed=interval_seed,
                calib_seed=calib_seed,
            )
            if len(orders) == 1:
                result = wbs_detect(X, orders[0], cfg)
            else:
                result = wbs_adaptive(X, orders, cfg)
            results = {
                "breaks": list(result.breaks.breaks),
                "records": [
                    {
                        "location": r.location,
                        "interval": [r.interval.s, r.interval.e],
                        "q": r.q,
                        "value": r.value,
                        "p_value": r.p_value,
                    }
                    for r in result.records
                ],
            }
            config = {
                "path": path, "method": method, "orders": list(orders),
                "m_intervals": m_intervals, "min_len": result.config.min_len,
                "threshold_level": threshold_level, "calib_reps": calib_reps,
                "calib_seed": calib_seed, "interval_seed": interval_seed,
            }
    except (ChangePointError, ValueError, OSError) as exc:
        _fail(exc)
    report = {
        "command": "estimate",
        "config": config,
        "results": results,
        "timing": {"seconds": time.perf_counter() - start},
    }
    _emit(report, as_csv)


@main.command()
@click.option("--kind", type=click.Choice([KIND_SINGLE, KIND_WBS_MAX]),
              default=KIND_SINGLE, show_default=True)
@click.option("--q", type=int, default=2, show_default=True)
@click.option("-n", "n_sim", type=int, required=True)
@click.option("-p", "p_sim", type=int, required=True)
@click.option("--reps", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--intervals", "m_intervals", type=int, default=None)
@click.option("--intervals-seed", type=int, default=None)
@click.option("--min-len", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def calibrate(kind, q, n_sim, p_sim, reps, seed, m_intervals, intervals_seed,
              min_len, out):
    """Simulate a null table and write it as JSON."""
    seed = _ensure_seed(seed, "--seed")
    try:
        table = simulate_null_samples(
            q, n_sim, p_sim, reps, seed, kind=kind,
            m_intervals=m_intervals, intervals_seed=intervals_seed,
            min_len=min_len,
        )
        save_null_table(table, out)
    except (ChangePointError, ValueError, OSError) as exc:
        _fail(exc)
    click.echo(json.dumps({"written": out, "kind": kind, "q": q, "R": reps,
                           "seed": seed}, sort_keys=True, separators=(",", ": ")))


@main.command()
@click.argument("name", type=click.Choice(scenario_names()))
@click.option("--set", "overrides", type=(str, str), multiple=True,
              help="Override a scenario default, e.g. --set reps 100.")
@click.option("--csv", "as_csv", is_flag=True, default=False)
def simulate(name, overrides, as_csv):
    """Run a registered simulation scenario and report its table rows."""
    parsed = {}
    for key, value in overrides:
        try:
            parsed[key] = json.loads(value)
        except json.JSONDecodeError:
            parsed[key] = value
    try:
        report = run_scenario(name, parsed)
    except (ChangePointError, ValueError, OSError) as exc:
        _fail(exc)
    _emit(report.to_json_dict(), as_csv)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--nodes", "m", type=int, required=True,
              help="Node count; rows must hold m*m adjacency entries.")
@click.option("--q", "orders", type=int, multiple=True, default=(2, 6),
              show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--null-reps", type=int, default=2000, show_default=True)
@click.option("--null-seed", type=int, default=None)
@click.option("--csv", "as_csv", is_flag=True, default=False)
def network(path, m, orders, alpha, null_reps, null_seed, as_csv):
    """Test a network series: rows of flattened m x m adjacency matrices.

    Each CSV row is an adjacency matrix in row-major order; it is vech'd
    (strict lower triangle) and the adaptive test runs on the result.
    """
    start = time.perf_counter()
    null_seed = _ensure_seed(null_seed, "--null-seed")
    try:
        raw = load_csv_matrix(path, has_header=False)
        if raw.p != m * m:
            raise ValueError(f"rows have {raw.p} entries, expected m*m = {m * m}")
        flat = raw.values.reshape(raw.n, m, m)
        X = DataMatrix(np.stack([vech(flat[t]) for t in range(raw.n)]))
        results, rows, reject = _run_test(X, orders, alpha, null_reps, null_seed, False)
    except (ChangePointError, ValueError, OSError) as exc:
        _fail(exc)
    report = {
        "command": "network",
        "config": {
            "path": path, "nodes": m, "orders": sorted(set(orders)),
            "alpha": alpha, "null_reps": null_reps, "null_seed": null_seed,
            "n": X.n, "p": X.p,
        },
        "results": results,
        "rows": rows,
        "timing": {"seconds": time.perf_counter() - start},
    }
    _emit(report, as_csv)
    sys.exit(EXIT_REJECT if reject else 0)


if __name__ == "__main__":
    main()
