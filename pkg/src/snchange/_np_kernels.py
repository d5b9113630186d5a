"""Pure-numpy kernels for the two-sample U-statistic machinery.

Everything here works on 0-based *boundary* positions: a boundary t within
[a, b) puts rows [a, t) left of the split and [t, b) right of it.  The
1-based split k of the public API maps to boundary t = k - s + 1 inside the
subsample starting at s.

The same kernel surface is implemented with explicit loops in
``_nb_kernels`` (numba); the backend is chosen via ``snchange.backend``.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "numpy"


def build_power_sums(y: np.ndarray, q: int) -> np.ndarray:
    """Cumulative per-coordinate sums of y**r, r = 1..q.

    Returns an array of shape (q, N+1, p) with sums[r-1, t, l] =
    sum_{u < t} y[u, l] ** r and a leading row of zeros.
    """
    n, p = y.shape
    cums = np.zeros((q, n + 1, p))
    pw = np.ones_like(y)
    for r in range(q):
        pw = pw * y
        np.cumsum(pw, axis=0, out=cums[r, 1:])
    return cums


def _elementary_from_power(ps: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_q from power sums p_1..p_q.

    Newton's identity: e_c = (1/c) * sum_{r=1..c} (-1)^(r-1) e_{c-r} p_r.
    ``ps`` has shape (q, ...); the result has shape (q+1, ...).
    """
    q = ps.shape[0]
    e = np.zeros((q + 1,) + ps.shape[1:])
    e[0] = 1.0
    for c in range(1, q + 1):
        acc = np.zeros_like(e[0])
        sign = 1.0
        for r in range(1, c + 1):
            acc += sign * e[c - r] * ps[r - 1]
            sign = -sign
        e[c] = acc / c
    return e


def _falling(x: np.ndarray, j: int) -> np.ndarray:
    """Falling factorial x (x-1) ... (x-j+1) as a float product."""
    out = np.ones_like(x, dtype=np.float64)
    for i in range(j):
        out = out * (x - i)
    return out


def u_profile(cums: np.ndarray, q: int, a: int, b: int) -> np.ndarray:
    """U(t; a, b) for every boundary t = a+q .. b-q.

    Uses the distinct-tuple expansion
    U = sum_c (-1)^(q-c) C(q,c) P(L-c, q-c) P(R-q+c, c)
        * sum_l [c! e_c(left_l)] [(q-c)! e_{q-c}(right_l)].
    """
    nt = b - a - 2 * q + 1
    if nt <= 0:
        return np.zeros(0)
    t = np.arange(a + q, b - q + 1)
    psl = cums[:, t, :] - cums[:, a, :][:, None, :]
    psr = cums[:, b, :][:, None, :] - cums[:, t, :]
    el = _elementary_from_power(psl)
    er = _elementary_from_power(psr)
    left = (t - a).astype(np.float64)
    right = (b - t).astype(np.float64)
    u = np.zeros(nt)
    for c in range(q + 1):
        coeff = (
            (-1.0) ** (q - c)
            * math.comb(q, c)
            * math.factorial(c)
            * math.factorial(q - c)
            * _falling(left - c, q - c)
            * _falling(right - (q - c), c)
        )
        u += coeff * np.einsum("tp,tp->t", el[c], er[q - c])
    return u


def u_value(cums: np.ndarray, q: int, a: int, b: int, t: int) -> float:
    """U at a single boundary t; 0 when either side has fewer than q rows."""
    if t - a < q or b - t < q:
        return 0.0
    return _u_single(cums, q, a, b, t)


def _u_single(cums, q, a, b, t):
    psl = cums[:, t, :] - cums[:, a, :]
    psr = cums[:, b, :] - cums[:, t, :]
    el = _elementary_from_power(psl)
    er = _elementary_from_power(psr)
    left = float(t - a)
    right = float(b - t)
    total = 0.0
    for c in range(q + 1):
        fall_l = 1.0
        for i in range(q - c):
            fall_l *= left - c - i
        fall_r = 1.0
        for i in range(c):
            fall_r *= right - (q - c) - i
        coeff = (
            (-1.0) ** (q - c)
            * math.comb(q, c)
            * math.factorial(c)
            * math.factorial(q - c)
            * fall_l
            * fall_r
        )
        total += coeff * float(el[c] @ er[q - c])
    return total


def sn_profile(y: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerator U and self-normalizer W over the trimmed split range.

    For a subsample of length N the boundaries run 2q .. N-2q and
    W(t) = (1/N) [ sum_{tau} U(tau; 0, t)^2 + sum_{tau} U(tau; t, N)^2 ].
    Returns (u, w), each of length N - 4q + 1.
    """
    n = y.shape[0]
    nk = n - 4 * q + 1
    cums = build_power_sums(y, q)
    num = u_profile(cums, q, 0, n)
    u = num[q : q + nk].copy()
    w = np.empty(nk)
    for i in range(nk):
        kb = 2 * q + i
        left = u_profile(cums, q, 0, kb)
        right = u_profile(cums, q, kb, n)
        w[i] = (left @ left + right @ right) / n
    return u, w


def _best_ratio(u: np.ndarray, w: np.ndarray) -> tuple[float, int]:
    """Max of u^2/w and its first argmax; w == 0 maps to +inf if u != 0."""
    best = -1.0
    arg = 0
    for i in range(u.shape[0]):
        if w[i] > 0.0:
            r = u[i] * u[i] / w[i]
        elif u[i] != 0.0:
            r = np.inf
        else:
            r = 0.0
        if r > best:
            best = r
            arg = i
    return best, arg


def interval_scan(
    y: np.ndarray, q: int, starts: np.ndarray, ends: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Max self-normalized ratio and its boundary for each interval.

    ``starts``/``ends`` are 0-based half-open row ranges into ``y``.  Returns
    (values, boundaries) where boundaries are absolute 0-based boundary
    positions within ``y``.
    """
    m = starts.shape[0]
    vals = np.empty(m)
    bounds = np.empty(m, dtype=np.int64)
    for i in range(m):
        u, w = sn_profile(y[starts[i] : ends[i]], q)
        best, arg = _best_ratio(u, w)
        vals[i] = best
        bounds[i] = starts[i] + 2 * q + arg
    return vals, bounds
