"""Random-walk reduction of the lazy cocycle for periodic measures.

For a period-``j`` measure whose ratios are integer powers of ``b``, the log
lazy cocycle ``L_i`` sampled at block boundaries ``i = j*k`` is a sum of
i.i.d. block increments. Blocks are the index ranges ``[j(k-1), jk)`` so the
telescoping identity with :func:`~rncocycle.cocycle.log_walk` is exact.
"""

from __future__ import annotations

import csv
import io
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _rng, kernels
from .errors import InvalidParameter
from .measures import PeriodicSpec, kernel_tables, power_exponent


def _require_periodic(spec):
    if not isinstance(spec, PeriodicSpec):
        raise InvalidParameter(f"a periodic measure is required, got {spec!r}")
    if spec.natural_base is None:
        raise InvalidParameter(f"{spec!r} has no common power base for its ratios")


def residue_exponents(spec):
    """``log_b(m_r(0)/m_r(1))`` for each residue ``r``."""
    _require_periodic(spec)
    return [power_exponent(m.ratio, spec.natural_base) for m in spec.marginals]


def block_increment(spec, x, k):
    """``L_{jk} - L_{j(k-1)}`` from the bits at ``j(k-1) .. jk-1``."""
    if k < 1:
        raise InvalidParameter("blocks are numbered from 1")
    exps = residue_exponents(spec)
    j = spec.period
    start = j * (k - 1)
    return sum(e for r, e in enumerate(exps) if x.bit(start + r))


@dataclass
class BlockIncrementDistribution:
    support: list
    probs: list
    mean: Fraction

    def as_dict(self):
        return dict(zip(self.support, self.probs))

    @property
    def second_moment(self):
        return sum((Fraction(v * v) * p for v, p in zip(self.support, self.probs)), Fraction(0))


def exact_block_distribution(spec):
    """Enumerate all ``2^j`` block patterns with their exact probabilities."""
    _require_periodic(spec)
    exps = residue_exponents(spec)
    acc = defaultdict(Fraction)
    for bits in itertools.product((0, 1), repeat=spec.period):
        p = Fraction(1)
        for m, b in zip(spec.marginals, bits):
            p *= m.mass(b)
        acc[sum(e for e, b in zip(exps, bits) if b)] += p
    support = sorted(acc)
    probs = [acc[v] for v in support]
    assert sum(probs) == 1
    mean = sum((v * p for v, p in zip(support, probs)), Fraction(0))
    return BlockIncrementDistribution(support, probs, mean)


@dataclass
class WalkPath:
    values: np.ndarray
    running_max: int
    running_min: int
    hit_times: dict = field(default_factory=dict)

    @property
    def increments(self):
        return np.diff(self.values)


def _tables(spec):
    modes, thresholds = kernel_tables(spec)
    return modes, thresholds, residue_exponents(spec)


def _first_index(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else -1


def simulate_walk(spec, seed, blocks, thresholds=()):
    """Walk ``L_{jk}``, ``k = 0..blocks``, of the sequence with the given seed.

    Bits are the same ones a :class:`~rncocycle.bitspace.BitSequence` with
    empty prefix and this seed would produce. ``hit_times[T]`` is the pair of
    first block indices reaching ``+T`` and ``-T`` (``-1`` if never).
    """
    _require_periodic(spec)
    modes, thr, exps = _tables(spec)
    values = kernels.walk_values(_rng.seed_key(seed), modes, thr, exps, blocks)
    hits = {int(T): (_first_index(values >= T), _first_index(values <= -T)) for T in thresholds}
    return WalkPath(values, int(values.max()), int(values.min()), hits)


def path_seeds(master_seed, n_paths):
    return _rng.split_seeds(master_seed, n_paths)


@dataclass
class OscillationResult:
    seeds: list
    levels: list
    blocks: int
    final: np.ndarray
    maxv: np.ndarray
    minv: np.ndarray
    hit_up: np.ndarray
    hit_down: np.ndarray

    def both_sided(self, horizon=None):
        """Per-path, per-level indicator of reaching both ``+T`` and ``-T`` by ``horizon``."""
        horizon = self.blocks if horizon is None else horizon
        up = (self.hit_up >= 0) & (self.hit_up <= horizon)
        down = (self.hit_down >= 0) & (self.hit_down <= horizon)
        return up & down

    def fractions(self, horizon=None):
        if not len(self.seeds):
            return {T: 1.0 if T == 0 else 0.0 for T in self.levels}
        both = self.both_sided(horizon)
        return {T: float(both[:, i].mean()) for i, T in enumerate(self.levels)}

    def hit_quantiles(self, qs=(0.1, 0.5, 0.9)):
        out = {}
        for i, T in enumerate(self.levels):
            both = self.both_sided()[:, i]
            t = np.maximum(self.hit_up[:, i], self.hit_down[:, i])[both]
            out[T] = {str(q): (float(np.quantile(t, q)) if t.size else None) for q in qs}
        return out

    def summary(self, spec, horizons=()):
        dist = exact_block_distribution(spec)
        return {
            "period": spec.period,
            "base": spec.natural_base,
            "exact_block_mean": f"{dist.mean.numerator}/{dist.mean.denominator}",
            "zero_mean": dist.mean == 0,
            "paths": len(self.seeds),
            "blocks": self.blocks,
            "thresholds": list(self.levels),
            "both_sided_fraction": {str(T): f for T, f in self.fractions().items()},
            "both_sided_fraction_by_horizon": {
                str(h): {str(T): f for T, f in self.fractions(h).items()} for h in horizons
            },
            "hit_time_quantiles": {str(T): q for T, q in self.hit_quantiles().items()},
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["seed", "final_L", "max", "min"]
        for T in self.levels:
            header += [f"hit_time_+{T}", f"hit_time_-{T}"]
        w.writerow(header)
        for p, seed in enumerate(self.seeds):
            row = [seed, int(self.final[p]), int(self.maxv[p]), int(self.minv[p])]
            for i in range(len(self.levels)):
                row += [int(self.hit_up[p, i]), int(self.hit_down[p, i])]
            w.writerow(row)
        return buf.getvalue()


def oscillation_report(spec, n_paths, blocks, thresholds, master_seed=0, impl=None):
    """Run ``n_paths`` independent walks; see :class:`OscillationResult`."""
    _require_periodic(spec)
    levels = sorted({int(T) for T in thresholds})
    if any(T < 0 for T in levels):
        raise InvalidParameter("thresholds must be non-negative")
    seeds = path_seeds(master_seed, n_paths)
    keys = np.array([_rng.seed_key(s) for s in seeds], dtype=np.uint64)
    modes, thr, exps = _tables(spec)
    final, maxv, minv, up, down = kernels.walk_batch(keys, modes, thr, exps, blocks, levels, impl=impl)
    return OscillationResult(seeds, levels, blocks, final, maxv, minv, up, down)


def _absorbed_mass(dist, blocks, lo, hi):
    """Mass still strictly inside ``(lo, hi)`` after ``blocks`` steps from 0.

    Callers emulate an open side with a far edge; mass pushed past it is
    dropped.
    """
    lo_edge = lo + 1
    hi_edge = hi - 1
    width = hi_edge - lo_edge + 1
    probs = np.array([float(p) for p in dist.probs])
    state = np.zeros(width)
    state[-lo_edge] = 1.0
    for _ in range(blocks):
        nxt = np.zeros(width)
        for v, p in zip(dist.support, probs):
            if v >= 0:
                nxt[v:] += p * state[: width - v]
            else:
                nxt[:v] += p * state[-v:]
        state = nxt
    return float(state.sum())


def both_sided_probability(spec, blocks, T):
    """Probability that the walk visits both ``>= T`` and ``<= -T`` within ``blocks`` steps.

    Computed by forward recursion of the exact block distribution (float64),
    independent of any sampling. Inclusion-exclusion over the two one-sided
    survival events.
    """
    if T <= 0:
        return 1.0
    dist = exact_block_distribution(spec)
    sd = float(dist.second_moment) ** 0.5
    pad = int(12 * sd * blocks**0.5) + 16 * max(abs(v) for v in dist.support) + T
    no_up = _absorbed_mass(dist, blocks, -pad, T)
    no_down = _absorbed_mass(dist, blocks, -T, pad)
    neither = _absorbed_mass(dist, blocks, -T, T)
    return 1.0 - no_up - no_down + neither
