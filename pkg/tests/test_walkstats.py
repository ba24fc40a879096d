import itertools
from fractions import Fraction as F

import numpy as np
import pytest

from rncocycle.bitspace import BitSequence
from rncocycle.cocycle import log_walk
from rncocycle.errors import InvalidParameter
from rncocycle.measures import make_period_j, make_sparse
from rncocycle.walkstats import (
    block_increment,
    both_sided_probability,
    exact_block_distribution,
    oscillation_report,
    simulate_walk,
)


def enumerate_distribution(j):
    """Independent oracle: brute force over all 2^j blocks with explicit marginals."""
    p1 = [F(j - 1, j)] + [F(1, j)] * (j - 1)
    inc = [-1] + [1] * (j - 1)
    out = {}
    for bits in itertools.product((0, 1), repeat=j):
        p = F(1)
        for q, b in zip(p1, bits):
            p *= q if b else 1 - q
        v = sum(i for i, b in zip(inc, bits) if b)
        out[v] = out.get(v, 0) + p
    return out


def test_block_increment_examples(period3):
    assert block_increment(period3, BitSequence("101", 0, period3), 1) == 0
    assert block_increment(period3, BitSequence("011", 0, period3), 1) == 2
    assert block_increment(period3, BitSequence("000111", 0, period3), 2) == 1
    with pytest.raises(InvalidParameter):
        block_increment(period3, BitSequence("011", 0, period3), 0)


def test_block_increment_requires_periodic(sparse):
    with pytest.raises(InvalidParameter):
        block_increment(sparse, BitSequence("011", 0, sparse), 1)


def test_exact_distribution_period3(period3):
    d = exact_block_distribution(period3)
    assert d.as_dict() == {-1: F(8, 27), 0: F(12, 27), 1: F(6, 27), 2: F(1, 27)}
    assert d.as_dict() == enumerate_distribution(3)
    assert d.mean == 0
    assert d.second_moment == F(2, 3)


@pytest.mark.parametrize("j", range(3, 13))
def test_exact_mean_zero(j):
    d = exact_block_distribution(make_period_j(j))
    assert d.mean == 0 and sum(d.probs) == 1
    assert d.as_dict() == enumerate_distribution(j)


def test_block_sums_telescope_to_log_walk():
    spec = make_period_j(3)
    for seed, blocks in [(s, 400) for s in range(100)] + [(s, 10**4) for s in range(1000, 1004)]:
        x = BitSequence((), seed, spec)
        walk = log_walk(spec, x, 3 * blocks)
        incs = [block_increment(spec, x, k) for k in range(1, blocks + 1)]
        assert list(np.cumsum(incs)) == walk[3::3]


def test_simulate_walk_zero_blocks(period3):
    path = simulate_walk(period3, 1, 0, thresholds=[0, 3])
    assert list(path.values) == [0]
    assert path.hit_times == {0: (0, 0), 3: (-1, -1)}


def test_simulate_walk_path_invariants():
    for j in (3, 4, 7):
        spec = make_period_j(j)
        path = simulate_walk(spec, 17, 5000, thresholds=[2, 8])
        assert np.abs(np.diff(path.values)).max() <= j - 1
        assert path.running_max == path.values.max() and path.running_min == path.values.min()
        up, down = path.hit_times[8]
        if up >= 0:
            assert path.values[up] >= 8 and (path.values[:up] < 8).all()


def test_simulate_walk_matches_bit_level(period3):
    path = simulate_walk(period3, 2024, 300)
    x = BitSequence((), 2024, period3)
    assert list(path.values) == log_walk(period3, x, 900)[::3]


@pytest.fixture(scope="module")
def long_increments():
    return simulate_walk(make_period_j(3), 99, 10**6).increments


def test_increment_frequencies_within_multinomial_band(long_increments, period3):
    n = len(long_increments)
    dist = exact_block_distribution(period3)
    for v, p in zip(dist.support, dist.probs):
        p = float(p)
        freq = (long_increments == v).mean()
        assert abs(freq - p) <= 4 * (p * (1 - p) / n) ** 0.5


def test_increment_mean_band(long_increments):
    assert -0.005 <= long_increments.mean() <= 0.005


def test_successive_increment_covariance(long_increments):
    z = long_increments.astype(float)
    cov = np.mean((z[:-1] - z.mean()) * (z[1:] - z.mean()))
    # Var(Z_k Z_{k+1}) = (2/3)^2 for independent zero-mean increments
    band = 4 * (2 / 3) / len(z) ** 0.5
    assert abs(cov) <= band


def test_oscillation_report_basics(period3):
    res = oscillation_report(period3, 200, 3000, [0, 2, 5, 10, 30], master_seed=5)
    fr = res.fractions()
    assert fr[0] == 1.0
    vals = [fr[T] for T in sorted(fr)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert res.fractions(300)[10] <= res.fractions(3000)[10]
    csv = res.to_csv().strip().split("\n")
    assert csv[0].startswith("seed,final_L,max,min,hit_time_+0,hit_time_-0")
    assert len(csv) == 201


def test_oscillation_report_zero_blocks(period3):
    res = oscillation_report(period3, 10, 0, [0, 4])
    assert res.fractions() == {0: 1.0, 4: 0.0}


def test_oscillation_rejects_nonperiodic():
    with pytest.raises(InvalidParameter):
        oscillation_report(make_sparse(), 1, 1, [0])


def test_both_sided_probability_matches_monte_carlo(period3):
    exact = both_sided_probability(period3, 2000, 5)
    res = oscillation_report(period3, 4000, 2000, [5], master_seed=11)
    freq = res.fractions()[5]
    assert abs(freq - exact) <= 4 * (exact * (1 - exact) / 4000) ** 0.5


def test_both_sided_probability_small_exact(period3):
    # after one block the walk is within [-1, 2]: reaching both +1 and -1 is impossible
    assert both_sided_probability(period3, 1, 1) == pytest.approx(0.0, abs=1e-15)
    # two blocks: both sides iff increments are (-1, +k) with k>=2 or (+k, -k') reaching both
    d = exact_block_distribution(period3).as_dict()
    expected = 0.0
    for a, pa in d.items():
        for b, pb in d.items():
            path = [a, a + b]
            if max(path) >= 1 and min(path) <= -1:
                expected += float(pa * pb)
    assert both_sided_probability(period3, 2, 1) == pytest.approx(expected, abs=1e-14)
