"""Kernel backend selection.

The compiled extension is used when it imports; set ``RNCOCYCLE_PURE=1`` to
force the numpy fallback. Thread count for batched walks comes from
``RNCOCYCLE_THREADS``.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("RNCOCYCLE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _pykernels


def threads():
    try:
        return max(1, int(os.environ.get("RNCOCYCLE_THREADS", "1")))
    except ValueError:
        return 1


def fair_ones_count(key, start, stop):
    """Number of fair-marginal ones at indices ``start <= n < stop``."""
    return _impl.fair_ones_count(key, start, stop)


def uniforms_over_keys(keys, n):
    return _impl.uniforms_over_keys(np.ascontiguousarray(keys, dtype=np.uint64), n)


def walk_values(key, modes, thresholds, exps, blocks):
    return _impl.walk_values(
        key,
        np.ascontiguousarray(modes, dtype=np.uint8),
        np.ascontiguousarray(thresholds, dtype=np.uint64),
        np.ascontiguousarray(exps, dtype=np.int64),
        blocks,
    )


def walk_batch(keys, modes, thresholds, exps, blocks, levels, impl=None):
    """Simulate one walk per key; returns final, max, min, up-hits, down-hits.

    Results are split across ``RNCOCYCLE_THREADS`` workers and concatenated in
    key order, so output does not depend on the thread count.
    """
    impl = impl or _impl
    if list(levels) != sorted(levels) or any(lv < 0 for lv in levels):
        raise ValueError("levels must be sorted ascending and non-negative")
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    args = (
        np.ascontiguousarray(modes, dtype=np.uint8),
        np.ascontiguousarray(thresholds, dtype=np.uint64),
        np.ascontiguousarray(exps, dtype=np.int64),
        blocks,
        np.ascontiguousarray(levels, dtype=np.int64),
    )
    nt = min(threads(), max(1, len(keys)))
    if nt == 1:
        return impl.walk_batch(keys, *args)
    parts = np.array_split(keys, nt)
    with ThreadPoolExecutor(nt) as pool:
        outs = list(pool.map(lambda ks: impl.walk_batch(np.ascontiguousarray(ks), *args), parts))
    return tuple(np.concatenate([o[i] for o in outs]) for i in range(5))
