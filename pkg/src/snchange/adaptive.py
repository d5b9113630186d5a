"""Adaptive combination of per-order p-values.

Statistics of different even orders q are asymptotically independent under
the null, so the minimum p-value over a set I of orders has null law
1 - (1 - u)^|I|.  The adjusted p-value corrects for that, and rejecting when
it falls below alpha is exactly equivalent to comparing each p_q against the
per-order level 1 - (1 - alpha)^(1/|I|).
"""

from __future__ import annotations

from dataclasses import dataclass

from .datamodel import validate_qset
from .errors import MissingPValueError, OutOfRangeError


@dataclass(frozen=True)
class AdaptiveResult:
    """Outcome of the adaptive multi-order test."""

    orders: tuple[int, ...]
    per_q: dict[int, tuple[float, float]]  # q -> (statistic, p-value)
    p_ada: float
    p_adjusted: float
    alpha: float
    reject: bool


def _checked_p_values(orders: tuple[int, ...], p: dict[int, float]) -> list[float]:
    out = []
    for q in orders:
        if q not in p:
            raise MissingPValueError(q)
        pq = float(p[q])
        if not (0.0 < pq <= 1.0):
            raise OutOfRangeError(f"p-value for q={q} must be in (0, 1], got {pq}")
        out.append(pq)
    return out


def combine_p_values(orders, p: dict[int, float]) -> tuple[float, float]:
    """(p_ada, p_adjusted) = (min_q p_q, 1 - (1 - p_ada)^|I|)."""
    orders = validate_qset(orders)
    values = _checked_p_values(orders, p)
    p_ada = min(values)
    if len(orders) == 1:
        return p_ada, p_ada
    p_adjusted = 1.0 - (1.0 - p_ada) ** len(orders)
    return p_ada, p_adjusted


def per_q_level(alpha: float, n_orders: int) -> float:
    """The per-order level 1 - (1 - alpha)^(1/|I|) equivalent to alpha overall."""
    if not (0.0 < alpha < 1.0):
        raise OutOfRangeError(f"alpha must be in (0, 1), got {alpha}")
    if n_orders == 1:
        return alpha
    return 1.0 - (1.0 - alpha) ** (1.0 / n_orders)


def adaptive_decision(orders, p: dict[int, float], alpha: float,
                      stats: dict[int, float] | None = None) -> AdaptiveResult:
    """Adaptive test decision; rejects iff p_adjusted <= alpha.

    The decision is computed from the adjusted p-value; the per-order route
    (any p_q below the per-order level) agrees with it identically because
    u -> 1 - (1 - u)^|I| is strictly increasing.
    """
    orders = validate_qset(orders)
    if not (0.0 < alpha < 1.0):
        raise OutOfRangeError(f"alpha must be in (0, 1), got {alpha}")
    p_ada, p_adjusted = combine_p_values(orders, p)
    per_q = {q: (float("nan") if stats is None else float(stats.get(q, float("nan"))),
                 float(p[q])) for q in orders}
    return AdaptiveResult(
        orders=orders,
        per_q=per_q,
        p_ada=p_ada,
        p_adjusted=p_adjusted,
        alpha=alpha,
        reject=p_adjusted <= alpha,
    )
