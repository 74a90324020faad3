"""Compiled inner loops for the height-function Markov chain.

Randomness is a counter-based hash of ``(seed, time index, vertex)`` so that a
coupling-from-the-past run can replay any past sweep without storing it.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

# Neighbour offsets (dk, dq) and the rule value r: a neighbour u allows
# h(v) in {h(u) + r - 3, h(u) + r}.
NBR_DK = np.array([0, 0, -1, -1, 1, 1], dtype=np.int64)
NBR_DQ = np.array([-1, 1, 0, 1, 0, -1], dtype=np.int64)
NBR_R = np.array([1, 2, 2, 1, 1, 2], dtype=np.int64)


@njit(cache=True)
def mix64(x):
    """splitmix64 finaliser."""
    z = np.uint64(x) + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def sweep_key(seed, t):
    return mix64(mix64(np.uint64(seed)) ^ np.uint64(t))


@njit(cache=True)
def coin_up(key, v):
    return (mix64(key ^ (np.uint64(v) * _GOLDEN)) >> np.uint64(63)) == np.uint64(1)


@njit(cache=True)
def site_update(h, k, q, up):
    """Heat-bath move at an interior vertex: go to the top or bottom allowed value."""
    hv = h[k, q]
    if up:
        hi = hv + 3
        for i in range(6):
            lim = h[k + NBR_DK[i], q + NBR_DQ[i]] + NBR_R[i]
            if lim < hi:
                return
        h[k, q] = hi
    else:
        lo = hv - 3
        for i in range(6):
            lim = h[k + NBR_DK[i], q + NBR_DQ[i]] + NBR_R[i] - 3
            if lim > lo:
                return
        h[k, q] = lo


@njit(cache=True)
def sweep(h, ks, qs, width, seed, t):
    """One systematic pass over the interior vertices with coins for time t."""
    key = sweep_key(seed, t)
    for i in range(ks.shape[0]):
        k = ks[i]
        q = qs[i]
        site_update(h, k, q, coin_up(key, k * width + q))


@njit(cache=True)
def run_sweeps(h, ks, qs, width, seed, t_from, t_to):
    """Apply sweeps for t = t_from, t_from - 1, ..., t_to (inclusive)."""
    t = t_from
    while t >= t_to:
        sweep(h, ks, qs, width, seed, t)
        t -= 1


@njit(cache=True)
def cftp(hmin, hmax, ks, qs, seed, max_doublings):
    """Monotone CFTP; returns (sample, horizon) or horizon -1 on failure."""
    width = hmin.shape[1]
    T = 1
    for _ in range(max_doublings + 1):
        lo = hmin.copy()
        hi = hmax.copy()
        run_sweeps(lo, ks, qs, width, seed, T, 1)
        run_sweeps(hi, ks, qs, width, seed, T, 1)
        same = True
        for i in range(ks.shape[0]):
            if lo[ks[i], qs[i]] != hi[ks[i], qs[i]]:
                same = False
                break
        if same:
            return lo, T
        T *= 2
    return hmin.copy(), -1


@njit(cache=True)
def sample_seed(seed, index):
    return mix64(mix64(np.uint64(seed)) + np.uint64(index) * _GOLDEN) >> np.uint64(1)


@njit(cache=True)
def cftp_batch(hmin, hmax, ks, qs, seed, start, count, max_doublings):
    """CFTP for sample indices start..start+count-1; heights as int16."""
    out = np.empty((count, hmin.shape[0], hmin.shape[1]), dtype=np.int16)
    horizons = np.empty(count, dtype=np.int64)
    for j in range(count):
        s, T = cftp(hmin, hmax, ks, qs, sample_seed(seed, start + j), max_doublings)
        horizons[j] = T
        for a in range(s.shape[0]):
            for b in range(s.shape[1]):
                out[j, a, b] = s[a, b]
    return out, horizons
