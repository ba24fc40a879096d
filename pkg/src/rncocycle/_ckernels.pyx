# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Must agree bit-for-bit with ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, uint8_t

cnp.import_array()

cdef extern from *:
    """
    static inline int rn_popcount64(unsigned long long x) { return __builtin_popcountll(x); }
    """
    int rn_popcount64(unsigned long long x) nogil

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t FAIR_TAG = 0xD1B54A32D192ED03ULL


cdef inline uint64_t fmix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t uniform64(uint64_t key, uint64_t n) nogil:
    return fmix64(key ^ fmix64(n + GOLDEN))


cdef inline int bit_at(uint64_t key, uint64_t n, uint8_t mode, uint64_t thr) nogil:
    if mode:
        return <int>((uniform64(key ^ FAIR_TAG, n >> 6) >> (n & 63)) & 1)
    return uniform64(key, n) < thr


def fair_ones_count(uint64_t key, uint64_t start, uint64_t stop):
    cdef uint64_t fkey = key ^ FAIR_TAG
    cdef uint64_t total = 0, w, w0, w1, word, lo_mask, hi_mask
    if stop <= start:
        return 0
    w0 = start >> 6
    w1 = (stop - 1) >> 6
    with nogil:
        for w in range(w0, w1 + 1):
            word = uniform64(fkey, w)
            if w == w0:
                word &= ~((1ULL << (start & 63)) - 1ULL)
            if w == w1 and ((stop & 63) != 0):
                word &= (1ULL << (stop & 63)) - 1ULL
            total += rn_popcount64(word)
    return int(total)


def uniforms_over_keys(cnp.uint64_t[::1] keys, uint64_t n):
    cdef Py_ssize_t i, m = keys.shape[0]
    out = np.empty(m, dtype=np.uint64)
    cdef cnp.uint64_t[::1] o = out
    cdef uint64_t h = fmix64(n + GOLDEN)
    with nogil:
        for i in range(m):
            o[i] = fmix64(keys[i] ^ h)
    return out


def walk_values(uint64_t key, cnp.uint8_t[::1] modes, cnp.uint64_t[::1] thresholds,
                cnp.int64_t[::1] exps, Py_ssize_t blocks):
    cdef Py_ssize_t j = modes.shape[0], t, r
    cdef uint64_t base
    cdef int64_t level = 0
    out = np.zeros(blocks + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    with nogil:
        for t in range(blocks):
            base = <uint64_t>(t * j)
            for r in range(j):
                if bit_at(key, base + r, modes[r], thresholds[r]):
                    level += exps[r]
            o[t + 1] = level
    return out


def walk_batch(cnp.uint64_t[::1] keys, cnp.uint8_t[::1] modes, cnp.uint64_t[::1] thresholds,
               cnp.int64_t[::1] exps, Py_ssize_t blocks, cnp.int64_t[::1] levels):
    """``levels`` must be sorted ascending and non-negative."""
    cdef Py_ssize_t n = keys.shape[0], nl = levels.shape[0], j = modes.shape[0]
    cdef Py_ssize_t p, t, r, up, down
    cdef uint64_t key, base
    cdef int64_t level, hi, lo
    final = np.zeros(n, dtype=np.int64)
    maxv = np.zeros(n, dtype=np.int64)
    minv = np.zeros(n, dtype=np.int64)
    hit_up = np.full((n, nl), -1, dtype=np.int64)
    hit_down = np.full((n, nl), -1, dtype=np.int64)
    cdef cnp.int64_t[::1] f = final, mx = maxv, mn = minv
    cdef cnp.int64_t[:, ::1] hu = hit_up, hd = hit_down
    with nogil:
        for p in range(n):
            key = keys[p]
            level = 0
            hi = 0
            lo = 0
            up = 0
            down = 0
            while up < nl and levels[up] <= 0:
                hu[p, up] = 0
                up += 1
            while down < nl and levels[down] <= 0:
                hd[p, down] = 0
                down += 1
            for t in range(blocks):
                base = <uint64_t>(t * j)
                for r in range(j):
                    if bit_at(key, base + r, modes[r], thresholds[r]):
                        level += exps[r]
                if level > hi:
                    hi = level
                    while up < nl and levels[up] <= hi:
                        hu[p, up] = t + 1
                        up += 1
                if level < lo:
                    lo = level
                    while down < nl and -levels[down] >= lo:
                        hd[p, down] = t + 1
                        down += 1
            f[p] = level
            mx[p] = hi
            mn[p] = lo
    return final, maxv, minv, hit_up, hit_down
