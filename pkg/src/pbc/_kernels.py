"""Numerical kernels for the clustering engine.

All kernels operate on pattern strings stored as int16 arrays over 0..255
(literal bytes) plus 256 (wildcard). They are JIT-compiled with numba when
available and fall back to plain Python otherwise (slow, but identical
results; everything is integer arithmetic).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange

    NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

    prange = range

WILD = 256


@njit(cache=True)
def el_value(xs, ys, sx, sy, threshold):
    """Minimal encoding length increment of merging two clusters.

    Monotone-VARCHAR dynamic program over the two pattern strings, rolling
    two rows. ``threshold >= 0`` enables early abandonment: as soon as
    every completion provably exceeds the threshold, the negated proven
    lower bound (the row minimum minus the maximum possible wildcard
    refund still ahead) is returned, so -v means "the true value is >= v
    and v > threshold".
    """
    n = xs.shape[0]
    m = ys.shape[0]
    prev = np.empty(m + 1, np.int64)
    cur = np.empty(m + 1, np.int64)
    ptype = np.empty(m + 1, np.uint8)  # 1 = last token matched (pattern)
    ctype = np.empty(m + 1, np.uint8)

    prev[0] = 0
    ptype[0] = 1
    for j in range(1, m + 1):
        s = prev[j - 1]
        if ptype[j - 1] == 1:
            s += sx + sy
        if ys[j - 1] != WILD:
            s += sy
        else:
            s -= sy
        prev[j] = s
        ptype[j] = 0

    wy = 0
    for j in range(m):
        if ys[j] == WILD:
            wy += 1
    wx_after = 0
    if threshold >= 0:
        for i in range(n):
            if xs[i] == WILD:
                wx_after += 1

    for i in range(1, n + 1):
        cx = xs[i - 1]
        if cx == WILD:
            wx_after -= 1
        s = prev[0]
        if ptype[0] == 1:
            s += sx + sy
        if cx != WILD:
            s += sx
        else:
            s -= sx
        cur[0] = s
        ctype[0] = 0
        rowmin = s
        for j in range(1, m + 1):
            cy = ys[j - 1]
            a = prev[j]
            if ptype[j] == 1:
                a += sx + sy
            if cx != WILD:
                a += sx
            else:
                a -= sx
            b = cur[j - 1]
            if ctype[j - 1] == 1:
                b += sx + sy
            if cy != WILD:
                b += sy
            else:
                b -= sy
            v = a if a <= b else b
            t = np.uint8(0)
            if cx == cy and cx != WILD:
                d = prev[j - 1]
                if d < v:
                    v = d
                    t = np.uint8(1)
            cur[j] = v
            ctype[j] = t
            if v < rowmin:
                rowmin = v
        if threshold >= 0:
            slack = (wx_after + wy) * (sx + sy)
            if rowmin - slack > threshold:
                return np.int64(-(rowmin - slack))
        tmp = prev
        prev = cur
        cur = tmp
        tmpt = ptype
        ptype = ctype
        ctype = tmpt
    return prev[m]


@njit(cache=True)
def el_tables(xs, ys, sx, sy):
    """Full state/type tables of the increment DP, for traceback and tests."""
    n = xs.shape[0]
    m = ys.shape[0]
    state = np.empty((n + 1, m + 1), np.int64)
    typ = np.empty((n + 1, m + 1), np.uint8)
    state[0, 0] = 0
    typ[0, 0] = 1
    for j in range(1, m + 1):
        s = state[0, j - 1]
        if typ[0, j - 1] == 1:
            s += sx + sy
        if ys[j - 1] != WILD:
            s += sy
        else:
            s -= sy
        state[0, j] = s
        typ[0, j] = 0
    for i in range(1, n + 1):
        cx = xs[i - 1]
        s = state[i - 1, 0]
        if typ[i - 1, 0] == 1:
            s += sx + sy
        if cx != WILD:
            s += sx
        else:
            s -= sx
        state[i, 0] = s
        typ[i, 0] = 0
        for j in range(1, m + 1):
            cy = ys[j - 1]
            a = state[i - 1, j]
            if typ[i - 1, j] == 1:
                a += sx + sy
            if cx != WILD:
                a += sx
            else:
                a -= sx
            b = state[i, j - 1]
            if typ[i, j - 1] == 1:
                b += sx + sy
            if cy != WILD:
                b += sy
            else:
                b -= sy
            v = a if a <= b else b
            t = np.uint8(0)
            if cx == cy and cx != WILD:
                d = state[i - 1, j - 1]
                if d < v:
                    v = d
                    t = np.uint8(1)
            state[i, j] = v
            typ[i, j] = t
    return state, typ


@njit(cache=True)
def one_gram(h1, w1, s1, h2, w2, s2):
    """Size-weighted unmatched-symbol mass; lower bound of el_value.

    ``h`` are 256-long non-wildcard symbol counts, ``w`` wildcard counts.
    Wildcards are jokers: each wildcard from either string cancels one unit
    of surplus on each side. Valid as a lower bound for pattern strings
    without adjacent wildcards (which collapsed patterns guarantee).
    """
    sur1 = 0
    sur2 = 0
    for b in range(256):
        d = h1[b] - h2[b]
        if d > 0:
            sur1 += d
        else:
            sur2 -= d
    w = w1 + w2
    r1 = sur1 - w
    if r1 < 0:
        r1 = 0
    r2 = sur2 - w
    if r2 < 0:
        r2 = 0
    return s1 * r1 + s2 * r2


@njit(cache=True, parallel=True)
def one_gram_all_pairs(hists, wilds, sizes, idx):
    """1-gram distances for all i<j pairs over ``idx`` (flat triangle order)."""
    k = idx.shape[0]
    out = np.empty(k * (k - 1) // 2, np.int64)
    for a in prange(k):
        base = a * k - a * (a + 1) // 2 - a - 1
        i = idx[a]
        for b in range(a + 1, k):
            j = idx[b]
            out[base + b] = one_gram(
                hists[i], wilds[i], sizes[i], hists[j], wilds[j], sizes[j]
            )
    return out


@njit(cache=True, parallel=True)
def one_gram_one_vs_many(hists, wilds, sizes, i, others):
    out = np.empty(others.shape[0], np.int64)
    for a in prange(others.shape[0]):
        j = others[a]
        out[a] = one_gram(hists[i], wilds[i], sizes[i], hists[j], wilds[j], sizes[j])
    return out


@njit(cache=True, parallel=True)
def el_value_all_pairs(patmat, lens, sizes, idx):
    k = idx.shape[0]
    out = np.empty(k * (k - 1) // 2, np.int64)
    for a in prange(k):
        base = a * k - a * (a + 1) // 2 - a - 1
        i = idx[a]
        for b in range(a + 1, k):
            j = idx[b]
            out[base + b] = el_value(
                patmat[i, : lens[i]], patmat[j, : lens[j]], sizes[i], sizes[j], -1
            )
    return out


@njit(cache=True, parallel=True)
def el_value_one_vs_many(patmat, lens, sizes, i, others):
    out = np.empty(others.shape[0], np.int64)
    for a in prange(others.shape[0]):
        j = others[a]
        out[a] = el_value(
            patmat[i, : lens[i]], patmat[j, : lens[j]], sizes[i], sizes[j], -1
        )
    return out


@njit(cache=True, parallel=True)
def el_value_pairs(patmat, lens, sizes, ii, jj, threshold):
    """Batched DP over explicit pair lists, with one shared abandon threshold."""
    out = np.empty(ii.shape[0], np.int64)
    for a in prange(ii.shape[0]):
        i = ii[a]
        j = jj[a]
        out[a] = el_value(
            patmat[i, : lens[i]], patmat[j, : lens[j]], sizes[i], sizes[j], threshold
        )
    return out


@njit(cache=True)
def levenshtein(xs, ys):
    """Unit-cost edit distance; the wildcard is an ordinary symbol."""
    n = xs.shape[0]
    m = ys.shape[0]
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        for j in range(1, m + 1):
            cost = 0 if xs[i - 1] == ys[j - 1] else 1
            v = prev[j - 1] + cost
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            cur[j] = v
        tmp = prev
        prev = cur
        cur = tmp
    return prev[m]


def pattern_array(symbols) -> np.ndarray:
    return np.asarray(symbols, dtype=np.int16)


def symbol_histogram(symbols):
    """(256-long non-wildcard counts, wildcard count) of a pattern string."""
    h = np.zeros(256, np.int64)
    w = 0
    for s in symbols:
        if s == WILD:
            w += 1
        else:
            h[s] += 1
    return h, w
