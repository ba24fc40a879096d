"""Numpy fallback for the compiled kernels (same outputs, slower)."""

import numpy as np

from ._rng import FAIR_TAG, GOLDEN

_U = np.uint64
_GOLDEN = _U(GOLDEN)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_S30, _S27, _S31, _S6, _S63 = _U(30), _U(27), _U(31), _U(6), _U(63)

# chunk of blocks processed per vectorized step in walk_batch
_CHUNK = 512


def _fmix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _uniform(key, n):
    return _fmix(key ^ _fmix(n + _GOLDEN))


def _bits(key, idx, modes, thresholds, residue):
    """Bits at indices ``idx``; ``key`` broadcasts against ``idx``."""
    fair = modes[residue].astype(bool)
    u = _uniform(key, idx)
    out = u < thresholds[residue]
    if fair.any():
        fk = key ^ _U(FAIR_TAG)
        fw = _uniform(fk, idx >> _S6)
        fb = ((fw >> (idx & _S63)) & _U(1)).astype(bool)
        out = np.where(fair, fb, out)
    return out


def fair_ones_count(key, start, stop):
    if stop <= start:
        return 0
    fkey = _U(key ^ FAIR_TAG)
    total = 0
    w0, w1 = start >> 6, (stop - 1) >> 6
    step = 1 << 20
    with np.errstate(over="ignore"):
        for lo in range(w0, w1 + 1, step):
            ws = np.arange(lo, min(lo + step, w1 + 1), dtype=np.uint64)
            words = _uniform(fkey, ws)
            if lo == w0:
                words[0] &= _U(~((1 << (start & 63)) - 1) & ((1 << 64) - 1))
            if ws[-1] == w1 and stop & 63:
                words[-1] &= _U((1 << (stop & 63)) - 1)
            total += int(np.bitwise_count(words).sum())
    return total


def uniforms_over_keys(keys, n):
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _fmix(keys ^ _fmix(_U(n) + _GOLDEN))


def walk_values(key, modes, thresholds, exps, blocks):
    j = len(modes)
    idx = np.arange(blocks * j, dtype=np.uint64)
    residue = np.tile(np.arange(j), blocks)
    with np.errstate(over="ignore"):
        b = _bits(_U(key), idx, np.asarray(modes), np.asarray(thresholds, dtype=np.uint64), residue)
    inc = (b * np.asarray(exps, dtype=np.int64)[residue]).reshape(blocks, j).sum(axis=1)
    out = np.zeros(blocks + 1, dtype=np.int64)
    np.cumsum(inc, out=out[1:])
    return out


def walk_batch(keys, modes, thresholds, exps, blocks, levels):
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    modes = np.asarray(modes, dtype=np.uint8)
    thresholds = np.asarray(thresholds, dtype=np.uint64)
    exps = np.asarray(exps, dtype=np.int64)
    levels = np.asarray(levels, dtype=np.int64)
    n, nl, j = len(keys), len(levels), len(modes)
    level = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    lo = np.zeros(n, dtype=np.int64)
    hit_up = np.full((n, nl), -1, dtype=np.int64)
    hit_down = np.full((n, nl), -1, dtype=np.int64)
    hit_up[:, levels <= 0] = 0
    hit_down[:, levels <= 0] = 0
    for t0 in range(0, blocks, _CHUNK):
        c = min(_CHUNK, blocks - t0)
        idx = np.arange(t0 * j, (t0 + c) * j, dtype=np.uint64)
        residue = np.tile(np.arange(j), c)
        with np.errstate(over="ignore"):
            b = _bits(keys[:, None], idx[None, :], modes, thresholds, residue)
        inc = (b * exps[residue]).reshape(n, c, j).sum(axis=2)
        path = level[:, None] + np.cumsum(inc, axis=1)
        run_hi = np.maximum(np.maximum.accumulate(path, axis=1), hi[:, None])
        run_lo = np.minimum(np.minimum.accumulate(path, axis=1), lo[:, None])
        for li in range(nl):
            lv = levels[li]
            if lv <= 0:
                continue
            for hits, reached in ((hit_up, run_hi >= lv), (hit_down, run_lo <= -lv)):
                pending = hits[:, li] < 0
                got = pending & reached[:, -1]
                if got.any():
                    hits[got, li] = t0 + 1 + reached[got].argmax(axis=1)
        level = path[:, -1]
        hi = run_hi[:, -1]
        lo = run_lo[:, -1]
    return level, hi, lo, hit_up, hit_down
