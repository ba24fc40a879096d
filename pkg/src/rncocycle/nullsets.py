"""Tail bounds and block-coarse simulation for the sparse measure family.

Block ``k`` is the open index interval ``(n_k, n_{k+1})`` of fair bits
(``p_k^k - 1`` of them); the biased special bits sit at the ``n_k``. The
alternative ``"half-open"`` convention counts ``p_k^k`` fair bits per block and
is available wherever only the block length matters.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist

from . import _rng, kernels
from .cocycle import CocycleValue, decimal_str
from .errors import InvalidParameter, TooLarge
from .measures import bit_from_key, block_length, make_sparse, sparse_p

OPEN = "open"
HALF_OPEN = "half-open"
#: largest k whose interior binomial tail is summed exactly
EXACT_MAX_K = 3
#: dyadic floor used when a certified bound is far smaller than anything representable
LOG2_FLOOR = -1024
MAX_BLOCKS = 16
_SURROGATE_TAG = 0x2545F4914F6CDD1D
_LOG2E = Fraction(14426950408889634, 10**16)


def _s(k):
    return k * (k + 1) // 2


def interior_length(k, convention=OPEN):
    if convention == OPEN:
        return block_length(k) - 1
    if convention == HALF_OPEN:
        return block_length(k)
    raise InvalidParameter(f"unknown block convention {convention!r}")


def binomial_lower_tail(N, p):
    """``P(Bin(N, 1/2) <= p)`` as an exact rational."""
    total, c = 0, 1
    for i in range(min(p, N) + 1):
        total += c
        c = c * (N - i) // (i + 1)
    return Fraction(total, 1 << N)


def _log2_factorial(n):
    return math.lgamma(n + 1) / math.log(2)


@dataclass
class TailBound:
    k: int
    convention: str
    interior_length: int
    threshold: int
    exact_tail: Fraction | None
    log2_upper: int
    chain: list
    chain_exact: bool
    nominal_final_log2: int

    @property
    def chain_log2(self):
        if self.chain_exact:
            return [_log2_fraction(c) for c in self.chain]
        return list(self.chain)

    def chain_holds(self):
        """Each link dominates the exact tail and the one before it."""
        if not self.chain_exact:
            raise TooLarge("chain links are only exact for k <= 3")
        seq = [self.exact_tail] + self.chain
        return all(a <= b for a, b in zip(seq, seq[1:]))

    def to_json(self):
        exact = None
        if self.exact_tail is not None:
            exact = {
                "numerator": int_str(self.exact_tail.numerator),
                "denominator": int_str(self.exact_tail.denominator),
            }
        return {
            "k": self.k,
            "convention": self.convention,
            "interior_length": self.interior_length,
            "threshold": self.threshold,
            "exact_tail": exact,
            "log2_upper": self.log2_upper,
            "chain": self.chain_log2,
            "nominal_final_log2": self.nominal_final_log2,
        }


def int_str(n):
    """Decimal string of an arbitrarily large integer."""
    old = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        return str(n)
    finally:
        sys.set_int_max_str_digits(old)


def _log2_fraction(q):
    if q == 0:
        return -math.inf
    return math.log2(q.numerator) - math.log2(q.denominator) if q.denominator.bit_length() < 1000 else (
        (q.numerator.bit_length() - q.denominator.bit_length())
        + math.log2(_mantissa(q.numerator))
        - math.log2(_mantissa(q.denominator))
    )


def _mantissa(n):
    shift = max(n.bit_length() - 60, 0)
    return (n >> shift) / (1 << (n.bit_length() - shift - 1)) if n else 0.0


def exact_tail(k, convention=OPEN, exact=None):
    """Bound ``mu(Z_k)``, the chance a block holds at most ``p_k`` ones.

    For ``k <= 3`` the binomial tail and every link of the bounding chain

        2^-N sum_{i=1}^{p} N^i/i!  <=  2^-N p N^p/p!  <=  2^-N N^p  <=  2^(k p s - N)

    (``N`` the block length, ``s = k(k+1)/2``) are exact rationals. Larger
    ``k`` only get base-2 logarithms of the links. ``nominal_final_log2`` is the
    closing exponent with the block length ``p_k^k``.
    """
    if k < 1:
        raise InvalidParameter("k must be >= 1")
    if exact is None:
        exact = k <= EXACT_MAX_K
    if exact and k > EXACT_MAX_K:
        raise TooLarge(f"exact tail requested for k={k}; block length {interior_length(k, convention)} too large")
    N = interior_length(k, convention)
    p = sparse_p(k)
    final_log2 = k * p * _s(k) - N
    nominal_final = k * p * _s(k) - block_length(k)
    if exact:
        tail = binomial_lower_tail(N, p)
        denom = Fraction(1, 1 << N)
        link1 = denom * sum((Fraction(N**i, math.factorial(i)) for i in range(1, p + 1)), Fraction(0))
        link2 = denom * Fraction(p * N**p, math.factorial(p))
        link3 = denom * N**p
        link4 = Fraction(2) ** final_log2
        return TailBound(k, convention, N, p, tail, final_log2, [link1, link2, link3, link4], True, nominal_final)
    if N.bit_length() > 1000:
        # links beyond float range; the closing exponent stays exact
        return TailBound(k, convention, N, p, None, final_log2, [None, None, None, final_log2], False, nominal_final)
    log2N = N.bit_length() - 1 + math.log2(_mantissa(N))
    link2 = math.log2(p) + p * log2N - _log2_factorial(p) - N
    link3 = p * log2N - N
    # sum_{i<=p} N^i/i! = (N^p/p!) * sum_m prod_{t<m} (p-t)/N; the ratios are <= p/N << 1
    series, term, m = 1.0, 1.0, 0
    while m < p:
        term *= (p - m) / N
        if term < 1e-18 * series:
            break
        series += term
        m += 1
    link1 = p * log2N - _log2_factorial(p) + math.log2(series) - N
    return TailBound(k, convention, N, p, None, final_log2, [link1, link2, link3, final_log2], False, nominal_final)


def tail_summability_report(K, convention=OPEN):
    """Certified upper bound on ``sum_{k<=K} mu(Z_k)`` as an exact rational.

    Exact tails for ``k <= 3``; beyond that ``2^max(e, LOG2_FLOOR)`` with
    ``e`` the closing chain exponent.
    """
    if K < 1:
        raise InvalidParameter("K must be >= 1")
    total = Fraction(0)
    for k in range(1, K + 1):
        tb = exact_tail(k, convention)
        if tb.exact_tail is not None:
            term = tb.exact_tail
        else:
            term = Fraction(2) ** max(tb.log2_upper, LOG2_FLOOR)
        total += min(term, Fraction(1))
    return total


@dataclass(frozen=True)
class SpecialZeroSum:
    terms: int
    partial: Fraction
    tail_bound: Fraction

    @property
    def certified(self):
        return self.partial + self.tail_bound


def special_zero_summability(terms=64):
    """``sum_{k=1}^{terms} 1/(2^k+1)`` plus the bound ``2^-terms`` on the rest."""
    partial = sum((Fraction(1, (1 << k) + 1) for k in range(1, terms + 1)), Fraction(0))
    return SpecialZeroSum(terms, partial, Fraction(1, 1 << terms))


@dataclass
class BlockReport:
    k: int
    interior_length: int
    threshold: int
    ones_count: int
    special_bit: int
    weight_at_entry: CocycleValue
    block_sum: Fraction
    special_term: Fraction
    partial_sum: Fraction
    approximate: bool = False
    approx_error_log2: int | None = None

    @property
    def exceeds(self):
        return self.ones_count > self.threshold


@dataclass
class Trajectory:
    seed: int
    first_bit: int
    blocks: list = field(default_factory=list)

    @property
    def envelope(self):
        """Cocycle value after the last one consumed through the final block."""
        return self.blocks[-1].weight_at_entry.value if self.blocks else Fraction(1)

    @property
    def partial_sum(self):
        return self.blocks[-1].partial_sum if self.blocks else Fraction(self.first_bit)

    def envelope_after(self, k):
        return self.blocks[k - 1].weight_at_entry.value

    def special_hits(self, lo, hi):
        return all(b.special_bit for b in self.blocks[lo - 1 : hi])


def _surrogate_count(key, k, N, p):
    """Normal surrogate for ``Bin(N, 1/2)`` with a Hoeffding bound on ``P(count <= p)``."""
    u = _rng.uniform64(key ^ _SURROGATE_TAG, k)
    z = NormalDist().inv_cdf((u + 0.5) / 2.0**64)
    delta = (round(z * 2**30) * math.isqrt(N)) >> 31
    count = min(max(N // 2 + delta, 0), N)
    gap = Fraction(N, 2) - p
    if gap <= 0:
        return count, 0
    # exp(-2 gap^2 / N) in base 2, rounded up; log2(e) truncated so the bound stays valid
    err_log2 = -math.floor(2 * gap * gap / N * _LOG2E)
    return count, err_log2


def block_coarse_trajectory(seed, K_blocks, spec=None):
    """Walk the forward geodesic of one sparse-measure point block by block.

    Blocks ``k <= 3`` count their fair interior ones exactly from the same
    bits a :class:`~rncocycle.bitspace.BitSequence` with this seed would
    read; larger blocks use a flagged normal surrogate.
    """
    if not 0 <= K_blocks <= MAX_BLOCKS:
        raise InvalidParameter(f"K_blocks must lie in [0, {MAX_BLOCKS}]")
    spec = spec or make_sparse()
    key = _rng.seed_key(seed)
    first = bit_from_key(spec, 0, key)
    traj = Trajectory(seed, first)
    w = CocycleValue.of(1, 2)
    partial = Fraction(first)
    for k in range(1, K_blocks + 1):
        nk = spec.n(k)
        special = bit_from_key(spec, nk, key)
        if special:
            w = w * CocycleValue(Fraction(1, 1 << k), 2, -k)
        N = interior_length(k)
        p = sparse_p(k)
        if k <= EXACT_MAX_K:
            count = kernels.fair_ones_count(key, nk + 1, spec.n(k + 1))
            approx, err = False, None
        else:
            count, err = _surrogate_count(key, k, N, p)
            approx = True
        special_term = w.value if special else Fraction(0)
        block_sum = count * w.value
        partial += special_term + block_sum
        traj.blocks.append(BlockReport(k, N, p, count, special, w, block_sum, special_term, partial, approx, err))
    return traj


@dataclass
class VanishingSummary:
    trajectories: list
    K_blocks: int
    envelope_bound: Fraction
    sum_bound: Fraction
    hit_range: tuple

    @property
    def n_paths(self):
        return len(self.trajectories)

    def fraction_vanishing_nonsummable(self):
        if not self.trajectories:
            return 0.0
        good = sum(
            1 for t in self.trajectories if t.envelope <= self.envelope_bound and t.partial_sum >= self.sum_bound
        )
        return good / self.n_paths

    def fraction_special_hits(self):
        lo, hi = self.hit_range
        if hi > self.K_blocks:
            return None
        return sum(t.special_hits(lo, hi) for t in self.trajectories) / max(self.n_paths, 1)

    def exact_special_hits(self):
        lo, hi = self.hit_range
        out = Fraction(1)
        for k in range(lo, hi + 1):
            out *= Fraction(1 << k, (1 << k) + 1)
        return out

    def to_json(self):
        exact = self.exact_special_hits()
        return {
            "paths": self.n_paths,
            "K_blocks": self.K_blocks,
            "envelope_bound": str(self.envelope_bound),
            "sum_bound": str(self.sum_bound),
            "fraction_vanishing_nonsummable": self.fraction_vanishing_nonsummable(),
            "special_hit_range": list(self.hit_range),
            "fraction_special_hits": self.fraction_special_hits(),
            "exact_special_hits": f"{exact.numerator}/{exact.denominator}",
            "exact_special_hits_decimal": decimal_str(exact, 20),
        }


def vanishing_report(n_paths, K_blocks, master_seed=0, envelope_bound=Fraction(1, 1 << 15),
                     sum_bound=Fraction(1), hit_range=(3, 10)):
    """Simulate ``n_paths`` block-coarse trajectories from seeds split off ``master_seed``."""
    seeds = _rng.split_seeds(master_seed, n_paths)
    spec = make_sparse()
    trajs = [block_coarse_trajectory(s, K_blocks, spec) for s in seeds]
    return VanishingSummary(trajs, K_blocks, Fraction(envelope_bound), Fraction(sum_bound), tuple(hit_range))
