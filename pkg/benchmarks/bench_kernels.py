"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--paths 200] [--blocks 20000] [--repeat 3]

Both backends are checked for identical output before timing.
"""
import argparse
import time

import numpy as np

from rncocycle import _pykernels, _rng
from rncocycle.measures import kernel_tables, make_period_j
from rncocycle.walkstats import residue_exponents

try:
    from rncocycle import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=200)
    ap.add_argument("--blocks", type=int, default=20000)
    ap.add_argument("--fair-bits", type=int, default=1 << 22)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled extension not built; nothing to compare")
        return 1

    spec = make_period_j(3)
    modes, thr = kernel_tables(spec)
    modes = np.asarray(modes, dtype=np.uint8)
    thr = np.asarray(thr, dtype=np.uint64)
    exps = np.asarray(residue_exponents(spec), dtype=np.int64)
    levels = np.array([0, 5, 10], dtype=np.int64)
    keys = np.array([_rng.seed_key(s) for s in _rng.split_seeds(7, args.paths)], dtype=np.uint64)
    key = int(keys[0])

    cases = {
        f"walk_batch {args.paths}x{args.blocks}": lambda m: m.walk_batch(keys, modes, thr, exps, args.blocks, levels),
        f"fair_ones_count {args.fair_bits} bits": lambda m: m.fair_ones_count(key, 3, 3 + args.fair_bits),
        f"uniforms_over_keys {args.paths * 100}": lambda m: m.uniforms_over_keys(np.tile(keys, 100), 5),
    }
    print(f"{'kernel':<36}{'compiled s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, call in cases.items():
        a, b = call(_ckernels), call(_pykernels)
        same = all(np.array_equal(x, y) for x, y in zip(a, b)) if isinstance(a, tuple) else np.array_equal(a, b)
        if not same:
            raise SystemExit(f"{name}: backends disagree")
        tc = best_of(lambda: call(_ckernels), args.repeat)
        tp = best_of(lambda: call(_pykernels), args.repeat)
        print(f"{name:<36}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
