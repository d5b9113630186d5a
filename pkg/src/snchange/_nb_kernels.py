"""Numba-compiled kernels mirroring the surface of ``_np_kernels``.

The self-normalization profile uses an incremental update of elementary
symmetric polynomials (inserting one row costs O(q) per coordinate), which
brings the full profile down to O(N^2 p q) from the naive O(N^2 p q^2).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

NAME = "numba"


@njit(cache=True)
def build_power_sums(y, q):
    n, p = y.shape
    cums = np.zeros((q, n + 1, p))
    for l in range(p):
        for t in range(n):
            x = y[t, l]
            pw = 1.0
            for r in range(q):
                pw *= x
                cums[r, t + 1, l] = cums[r, t, l] + pw
    return cums


@njit(cache=True)
def _newton(ps, q, e):
    """e_0..e_q from power sums p_1..p_q via Newton's identities."""
    e[0] = 1.0
    for c in range(1, q + 1):
        acc = 0.0
        sign = 1.0
        for r in range(1, c + 1):
            acc += sign * e[c - r] * ps[r - 1]
            sign = -sign
        e[c] = acc / c


@njit(cache=True)
def _fill_coeffs(q, left, right, coeff):
    """coeff[c] = (-1)^(q-c) q! P(left-c, q-c) P(right-q+c, c).

    The q! absorbs C(q,c) c! (q-c)! from pairing the binomial choice of
    i-contributing factors with the distinct-tuple counts.
    """
    qfact = 1.0
    for i in range(2, q + 1):
        qfact *= i
    for c in range(q + 1):
        val = qfact if (q - c) % 2 == 0 else -qfact
        for i in range(q - c):
            val *= left - c - i
        for i in range(c):
            val *= right - (q - c) - i
        coeff[c] = val


@njit(cache=True)
def u_value(cums, q, a, b, t):
    if t - a < q or b - t < q:
        return 0.0
    p = cums.shape[2]
    psl = np.empty(q)
    psr = np.empty(q)
    el = np.empty(q + 1)
    er = np.empty(q + 1)
    coeff = np.empty(q + 1)
    dots = np.zeros(q + 1)
    _fill_coeffs(q, float(t - a), float(b - t), coeff)
    for l in range(p):
        for r in range(q):
            psl[r] = cums[r, t, l] - cums[r, a, l]
            psr[r] = cums[r, b, l] - cums[r, t, l]
        _newton(psl, q, el)
        _newton(psr, q, er)
        for c in range(q + 1):
            dots[c] += el[c] * er[q - c]
    total = 0.0
    for c in range(q + 1):
        total += coeff[c] * dots[c]
    return total


@njit(cache=True)
def u_profile(cums, q, a, b):
    nt = b - a - 2 * q + 1
    if nt <= 0:
        return np.zeros(0)
    out = np.empty(nt)
    for i in range(nt):
        out[i] = u_value(cums, q, a, b, a + q + i)
    return out


@njit(cache=True)
def _insert_value(e, q, x):
    """Extend elementary polynomials e_0..e_q by one more value x."""
    for c in range(q, 0, -1):
        e[c] += x * e[c - 1]


@njit(cache=True)
def sn_profile(y, q):
    """Numerator U and normalizer W for boundaries 2q .. N-2q (0-based)."""
    n, p = y.shape
    nk = n - 4 * q + 1
    u = np.zeros(nk)
    w = np.zeros(nk)
    coeff = np.empty(q + 1)

    # prefix/suffix elementary symmetric polynomials of whole-sample flanks
    ep = np.zeros((n + 1, p, q + 1))
    es = np.zeros((n + 1, p, q + 1))
    for l in range(p):
        ep[0, l, 0] = 1.0
        es[n, l, 0] = 1.0
    for t in range(1, n + 1):
        for l in range(p):
            for c in range(q + 1):
                ep[t, l, c] = ep[t - 1, l, c]
            _insert_value(ep[t, l], q, y[t - 1, l])
    for t in range(n - 1, -1, -1):
        for l in range(p):
            for c in range(q + 1):
                es[t, l, c] = es[t + 1, l, c]
            _insert_value(es[t, l], q, y[t, l])

    # numerator U(kb; 0, n)
    for i in range(nk):
        kb = 2 * q + i
        _fill_coeffs(q, float(kb), float(n - kb), coeff)
        val = 0.0
        for c in range(q + 1):
            dot = 0.0
            for l in range(p):
                dot += ep[kb, l, c] * es[kb, l, q - c]
            val += coeff[c] * dot
        u[i] = val

    # left sums: for each kb accumulate sum_t U(t; 0, kb)^2, t in [q, kb-q],
    # keeping re[t] = elementary polynomials of y[t:kb] updated incrementally
    re = np.zeros((n, p, q + 1))
    for kb in range(2 * q, n - 2 * q + 1):
        for t in range(q, kb - q):
            for l in range(p):
                _insert_value(re[t, l], q, y[kb - 1, l])
        tnew = kb - q
        for l in range(p):
            re[tnew, l, 0] = 1.0
            for c in range(1, q + 1):
                re[tnew, l, c] = 0.0
            for j in range(tnew, kb):
                _insert_value(re[tnew, l], q, y[j, l])
        ls = 0.0
        for t in range(q, kb - q + 1):
            _fill_coeffs(q, float(t), float(kb - t), coeff)
            val = 0.0
            for c in range(q + 1):
                dot = 0.0
                for l in range(p):
                    dot += ep[t, l, c] * re[t, l, q - c]
                val += coeff[c] * dot
            ls += val * val
        w[kb - 2 * q] += ls

    # right sums: sum_t U(t; kb, n)^2, t in [kb+q, n-q], with
    # le[t] = elementary polynomials of y[kb:t] updated as kb decreases
    le = np.zeros((n + 1, p, q + 1))
    for kb in range(n - 2 * q, 2 * q - 1, -1):
        for t in range(kb + q + 1, n - q + 1):
            for l in range(p):
                _insert_value(le[t, l], q, y[kb, l])
        tnew = kb + q
        for l in range(p):
            le[tnew, l, 0] = 1.0
            for c in range(1, q + 1):
                le[tnew, l, c] = 0.0
            for j in range(kb, tnew):
                _insert_value(le[tnew, l], q, y[j, l])
        rs = 0.0
        for t in range(kb + q, n - q + 1):
            _fill_coeffs(q, float(t - kb), float(n - t), coeff)
            val = 0.0
            for c in range(q + 1):
                dot = 0.0
                for l in range(p):
                    dot += le[t, l, c] * es[t, l, q - c]
                val += coeff[c] * dot
            rs += val * val
        w[kb - 2 * q] += rs

    for i in range(nk):
        w[i] /= n
    return u, w


@njit(cache=True)
def _best_ratio(u, w):
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


@njit(cache=True, parallel=True)
def interval_scan(y, q, starts, ends):
    m = starts.shape[0]
    vals = np.empty(m)
    bounds = np.empty(m, dtype=np.int64)
    for i in prange(m):
        u, w = sn_profile(y[starts[i] : ends[i]], q)
        best, arg = _best_ratio(u, w)
        vals[i] = best
        bounds[i] = starts[i] + 2 * q + arg
    return vals, bounds
