import numpy as np
import pytest

from rncocycle import _pykernels, _rng, kernels
from rncocycle.bitspace import BitSequence
from rncocycle.cocycle import log_walk
from rncocycle.measures import kernel_tables, make_period_j, make_sparse, sample_bit
from rncocycle.walkstats import residue_exponents

try:
    from rncocycle import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

IMPLS = [_pykernels] + ([_ckernels] if _ckernels else [])


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_fmix_is_reference_splitmix():
    # first output of SplitMix64 seeded with 0 is a published constant
    assert _rng.fmix64(_rng.GOLDEN) == 0xE220A8397B1DCDAF


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
@pytest.mark.parametrize("start,stop", [(0, 0), (9, 3), (0, 1), (3, 67), (5, 64), (64, 128), (1, 1000), (68, 4100)])
def test_fair_count_matches_scalar_bits(impl, start, stop):
    key = _rng.seed_key(987654321)
    expected = sum(_rng.fair_bit(key, n) for n in range(start, stop))
    assert impl.fair_ones_count(key, start, stop) == expected


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
def test_fair_count_backends_agree_on_long_range():
    for seed in range(5):
        key = _rng.seed_key(seed)
        assert _ckernels.fair_ones_count(key, 68, 262211) == _pykernels.fair_ones_count(key, 68, 262211)


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
def test_uniforms_over_keys(impl):
    seeds = list(range(50))
    keys = np.array([_rng.seed_key(s) for s in seeds], dtype=np.uint64)
    got = impl.uniforms_over_keys(keys, 12345)
    assert [int(v) for v in got] == [_rng.uniform64(_rng.seed_key(s), 12345) for s in seeds]


@pytest.mark.parametrize("impl", IMPLS, ids=lambda m: m.__name__.split(".")[-1])
@pytest.mark.parametrize("j", [3, 4, 7])
def test_walk_values_match_bit_level_log_walk(impl, j):
    spec = make_period_j(j)
    modes, thr = kernel_tables(spec)
    exps = residue_exponents(spec)
    for seed in (1, 42, 2**63 + 5):
        vals = impl.walk_values(_rng.seed_key(seed), np.array(modes, np.uint8), np.array(thr, np.uint64),
                                np.array(exps, np.int64), 200)
        x = BitSequence((), seed, spec)
        walk = log_walk(spec, x, 200 * j)
        assert list(vals) == walk[::j]


def test_walk_batch_backends_agree():
    if _ckernels is None:
        pytest.skip("compiled kernels not built")
    spec = make_period_j(3)
    modes, thr = kernel_tables(spec)
    exps = residue_exponents(spec)
    keys = np.array([_rng.seed_key(s) for s in _rng.split_seeds(7, 40)], dtype=np.uint64)
    levels = [0, 1, 3, 10, 30]
    a = kernels.walk_batch(keys, modes, thr, exps, 3000, levels, impl=_ckernels)
    b = kernels.walk_batch(keys, modes, thr, exps, 3000, levels, impl=_pykernels)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_walk_batch_consistent_with_walk_values():
    spec = make_period_j(3)
    modes, thr = kernel_tables(spec)
    exps = residue_exponents(spec)
    seeds = _rng.split_seeds(3, 10)
    keys = np.array([_rng.seed_key(s) for s in seeds], dtype=np.uint64)
    final, hi, lo, up, down = kernels.walk_batch(keys, modes, thr, exps, 2000, [0, 4, 12])
    for p, key in enumerate(keys):
        v = kernels.walk_values(int(key), modes, thr, exps, 2000)
        assert final[p] == v[-1] and hi[p] == v.max() and lo[p] == v.min()
        for i, T in enumerate([0, 4, 12]):
            exp_up = np.flatnonzero(v >= T)
            exp_down = np.flatnonzero(v <= -T)
            assert up[p, i] == (exp_up[0] if exp_up.size else -1)
            assert down[p, i] == (exp_down[0] if exp_down.size else -1)


def test_walk_batch_thread_count_invariant(monkeypatch):
    spec = make_period_j(4)
    modes, thr = kernel_tables(spec)
    exps = residue_exponents(spec)
    keys = np.array([_rng.seed_key(s) for s in range(13)], dtype=np.uint64)
    monkeypatch.setenv("RNCOCYCLE_THREADS", "1")
    a = kernels.walk_batch(keys, modes, thr, exps, 500, [2, 5])
    monkeypatch.setenv("RNCOCYCLE_THREADS", "3")
    b = kernels.walk_batch(keys, modes, thr, exps, 500, [2, 5])
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_walk_batch_rejects_unsorted_levels():
    spec = make_period_j(3)
    modes, thr = kernel_tables(spec)
    with pytest.raises(ValueError):
        kernels.walk_batch(np.zeros(1, np.uint64), modes, thr, residue_exponents(spec), 10, [5, 1])


def test_threshold_exactness():
    from fractions import Fraction

    for p1 in (Fraction(1, 3), Fraction(2, 3), Fraction(4, 5), Fraction(1, 2**40)):
        t = _rng.threshold(p1)
        # u < t  iff  u * den < num * 2^64
        for u in (t - 1, t, t + 1):
            if 0 <= u < 2**64:
                assert (u < t) == (u * p1.denominator < p1.numerator * 2**64)


def test_sample_bit_uses_fair_words_for_fair_marginals():
    spec = make_sparse()
    key = _rng.seed_key(11)
    for n in (0, 2, 4, 5, 100):
        assert sample_bit(spec, n, 11) == _rng.fair_bit(key, n)


def test_pure_env_selects_fallback_with_same_output():
    import os
    import subprocess
    import sys

    code = (
        "from rncocycle import kernels; from rncocycle.walkstats import oscillation_report;"
        "from rncocycle.measures import make_period_j;"
        "r = oscillation_report(make_period_j(3), 20, 3000, [0, 4], 5);"
        "print(kernels.BACKEND, r.to_csv())"
    )
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, RNCOCYCLE_PURE=flag)
        outs[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                    text=True, check=True).stdout
    assert outs["1"].startswith("python ")
    assert outs["0"].split(" ", 1)[1] == outs["1"].split(" ", 1)[1]
