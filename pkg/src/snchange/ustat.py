"""Exact two-sample U-statistics of order (q, q) for mean changes.

``u_stat`` evaluates, for a split k inside [s, m],

    U(k; s, m) = sum_l sum*_{s<=i_1..i_q<=k} sum*_{k+1<=j_1..j_q<=m}
                 prod_t (X[i_t, l] - X[j_t, l]),

where sum* runs over pairwise-distinct indices.  Expanding each product over
which factor contributes its i-part turns this into a weighted sum of
products of distinct-index product sums on either side of the split, which
elementary symmetric polynomials deliver in O(p q^2) per split instead of
enumerating O(n^q) tuples.  ``u_stat_naive`` is the literal enumeration kept
as a test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .backend import kernels
from .datamodel import DataMatrix, Interval, validate_even_order
from .errors import (
    IntervalTooShortError,
    InvalidSplitError,
    OrderExceedsQError,
    SizeGuardError,
)


@dataclass(frozen=True)
class PrefixPowerSums:
    """Per-coordinate cumulative sums of X**r for r = 1..q.

    sums[r-1, t, l] = sum_{u <= t} X[u, l]**r with a leading zero row, so the
    power sum over rows a..b (1-based) is sums[r-1, b, l] - sums[r-1, a-1, l].
    """

    q: int
    n: int
    p: int
    sums: np.ndarray

    def interval_power_sum(self, iv: Interval, r: int, l: int) -> float:
        if not (1 <= r <= self.q):
            raise OrderExceedsQError(f"power {r} outside 1..{self.q}")
        if iv.e > self.n or not (1 <= l <= self.p):
            raise IndexError(f"interval {iv} / coordinate {l} out of range")
        return float(self.sums[r - 1, iv.e, l - 1] - self.sums[r - 1, iv.s - 1, l - 1])


def prefix_power_sums(X: DataMatrix, q: int) -> PrefixPowerSums:
    q = validate_even_order(q)
    sums = kernels().build_power_sums(X.values, q)
    return PrefixPowerSums(q=q, n=X.n, p=X.p, sums=sums)


def distinct_product_sum(pps: PrefixPowerSums, iv: Interval, c: int, l: int) -> float:
    """Sum over ordered c-tuples of distinct indices in iv of the value product.

    Equals c! e_c where e_c is the c-th elementary symmetric polynomial of the
    interval's values in coordinate l; 0 when c exceeds the interval length.
    """
    if c < 0 or c > pps.q:
        raise OrderExceedsQError(f"order {c} outside 0..{pps.q}")
    if c == 0:
        return 1.0
    if c > iv.length:
        return 0.0
    ps = np.array([pps.interval_power_sum(iv, r, l) for r in range(1, c + 1)])
    e = np.zeros(c + 1)
    e[0] = 1.0
    for cc in range(1, c + 1):
        acc = 0.0
        sign = 1.0
        for r in range(1, cc + 1):
            acc += sign * e[cc - r] * ps[r - 1]
            sign = -sign
        e[cc] = acc / cc
    return math.factorial(c) * float(e[c])


def _check_split(k: int, s: int, m: int, n: int) -> None:
    if not (1 <= s <= n and s <= m <= n):
        raise InvalidSplitError(f"(s, m)=({s}, {m}) outside 1..{n}")
    if k < s or k >= m:
        raise InvalidSplitError(f"need s <= k < m, got (k, s, m)=({k}, {s}, {m})")


def u_stat(X: DataMatrix, q: int, k: int, s: int = 1, m: int | None = None,
           pps: PrefixPowerSums | None = None) -> float:
    """U(k; s, m); 0 when either side of the split has fewer than q points."""
    q = validate_even_order(q)
    m = X.n if m is None else m
    _check_split(k, s, m, X.n)
    if pps is None:
        pps = prefix_power_sums(X, q)
    elif pps.q < q:
        raise OrderExceedsQError(f"prefix sums prepared for q={pps.q} < {q}")
    # kernel boundary convention: rows [a, t) left, [t, b) right, 0-based
    return float(kernels().u_value(pps.sums[:q], q, s - 1, m, k))


@lru_cache(maxsize=256)
def _perm_indices(n: int, q: int) -> np.ndarray:
    """All ordered q-tuples of distinct indices below n, as an index array."""
    return np.array(list(permutations(range(n), q)), dtype=np.intp)


def u_stat_naive(X: DataMatrix, q: int, k: int, s: int = 1, m: int | None = None,
                 tuple_budget: int = 10**8) -> float:
    """Literal enumeration of all ordered pairwise-distinct tuples (oracle)."""
    q = validate_even_order(q)
    m = X.n if m is None else m
    _check_split(k, s, m, X.n)
    nl = k - s + 1
    nr = m - k
    if nl < q or nr < q:
        return 0.0
    count = math.perm(nl, q) * math.perm(nr, q)
    if count > tuple_budget:
        raise SizeGuardError(f"{count} tuples exceed the budget {tuple_budget}")
    left = X.values[s - 1 : k]
    right = X.values[k:m]
    li = _perm_indices(nl, q)
    ri = _perm_indices(nr, q)
    total = 0.0
    chunk = max(1, 2_000_000 // max(1, ri.shape[0]))
    for l in range(X.p):
        a = left[li, l]
        b = right[ri, l]
        for start in range(0, a.shape[0], chunk):
            diff = a[start : start + chunk, None, :] - b[None, :, :]
            total += float(diff.prod(axis=2).sum())
    return total


def u_profile(X: DataMatrix, q: int, iv: Interval | None = None,
              pps: PrefixPowerSums | None = None) -> np.ndarray:
    """U(t; s, m) for every split t = s+q-1 .. m-q inside the interval."""
    q = validate_even_order(q)
    iv = Interval(1, X.n) if iv is None else iv
    if iv.e > X.n:
        raise IntervalTooShortError(f"interval {iv} exceeds n={X.n}")
    if iv.length < 2 * q:
        raise IntervalTooShortError(
            f"interval length {iv.length} < 2q = {2 * q}"
        )
    if pps is None:
        pps = prefix_power_sums(X, q)
    return np.asarray(kernels().u_profile(pps.sums[:q], q, iv.s - 1, iv.e))


def falling_factorial(x: float, j: int) -> float:
    """x (x-1) ... (x-j+1) as a float product (overflow-safe counting)."""
    out = 1.0
    for i in range(j):
        out *= x - i
    return out


def normalized_t_stat(X: DataMatrix, q: int, k: int,
                      pps: PrefixPowerSums | None = None) -> float:
    """T(k) = U(k; 1, n) / (P(k, q) P(n-k, q)), the unbiased |Delta|_q^q estimate."""
    q = validate_even_order(q)
    if not (q <= k <= X.n - q):
        raise InvalidSplitError(f"need q <= k <= n-q, got k={k}, n={X.n}")
    norm = falling_factorial(float(k), q) * falling_factorial(float(X.n - k), q)
    return u_stat(X, q, k, 1, X.n, pps=pps) / norm
