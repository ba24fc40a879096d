"""Bernoulli product measures on binary sequences, given by exact rules.

All arithmetic is over :class:`fractions.Fraction`; nothing here touches a
float.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from . import _rng
from .errors import InvalidParameter, NotPowerCompatible

#: index of the first special bit of the sparse family (the recurrence starts at k=1)
SPARSE_N1 = 1
#: last precomputed schedule entry; n_24 already has thousands of bits
SPARSE_MAX_K = 24



@dataclass(frozen=True)
class Marginal:
    p0: Fraction
    p1: Fraction

    def __post_init__(self):
        p0, p1 = Fraction(self.p0), Fraction(self.p1)
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "p1", p1)
        if p0 + p1 != 1:
            raise InvalidParameter(f"marginal masses must sum to 1, got {p0} + {p1}")
        if not (0 < p0 < 1 and 0 < p1 < 1):
            raise InvalidParameter(f"marginal must be non-trivial, got ({p0}, {p1})")

    @classmethod
    def from_p1(cls, p1):
        p1 = Fraction(p1)
        return cls(1 - p1, p1)

    def mass(self, bit):
        return self.p1 if bit else self.p0

    @cached_property
    def ratio(self):
        return self.p0 / self.p1

    @property
    def is_fair(self):
        return self.p1 == Fraction(1, 2)

    def __str__(self):
        return f"{self.p0}:{self.p1}"


FAIR = Marginal(Fraction(1, 2), Fraction(1, 2))


class MeasureSpec:
    """Rule assigning each index ``n`` a :class:`Marginal`.

    Subclasses are immutable and hashable; ``natural_base`` names the base in
    which every ratio is an integer power, when the family guarantees one.
    """

    variant = "abstract"
    natural_base: int | None = None

    def marginal_at(self, n) -> Marginal:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def _key(self):
        raise NotImplementedError


class PeriodicSpec(MeasureSpec):
    variant = "periodic"

    def __init__(self, marginals):
        marginals = tuple(marginals)
        if len(marginals) < 3:
            raise InvalidParameter(f"period must be >= 3, got {len(marginals)}")
        self.marginals = marginals
        self.period = len(marginals)
        self.natural_base = _common_base([m.ratio for m in marginals])

    def marginal_at(self, n):
        return self.marginals[n % self.period]

    def _key(self):
        return self.marginals

    def __repr__(self):
        return f"PeriodicSpec(j={self.period}, marginals=[{', '.join(map(str, self.marginals))}])"


class SparseSpec(MeasureSpec):
    """Fair marginals except at the sparse schedule ``n_1 < n_2 < ...``.

    At ``n_k`` the marginal is ``(1/(2^k+1), 2^k/(2^k+1))`` so the ratio is
    ``2^-k``. ``n_0 = 0`` is an ordinary fair index.
    """

    variant = "sparse"
    natural_base = 2

    def __init__(self, n1=SPARSE_N1):
        if n1 < 1:
            raise InvalidParameter("n1 must be >= 1")
        self.n1 = n1
        sched = [0, n1]
        for k in range(1, SPARSE_MAX_K):
            sched.append(sched[k] + block_length(k))
        self._schedule = tuple(sched)

    def _key(self):
        return (self.n1,)

    def __repr__(self):
        return f"SparseSpec(n1={self.n1})"

    def n(self, k):
        """Schedule entry ``n_k``."""
        if not 0 <= k <= SPARSE_MAX_K:
            raise InvalidParameter(f"schedule index must lie in [0, {SPARSE_MAX_K}], got {k}")
        return self._schedule[k]

    def index_of(self, n):
        """``k >= 1`` with ``n_k == n``, else ``None``."""
        k = 1
        while k < SPARSE_MAX_K and self._schedule[k] < n:
            k += 1
        return k if self._schedule[k] == n else None

    def marginal_at(self, n):
        k = self.index_of(n)
        if k is None:
            return FAIR
        return _sparse_marginal(k)


class CustomSpec(MeasureSpec):
    """Explicit head of marginals followed by a periodic tail cycle."""

    variant = "custom"

    def __init__(self, head, tail):
        self.head = tuple(head)
        self.tail = tuple(tail)
        if not self.tail:
            raise InvalidParameter("custom spec needs a non-empty tail cycle")
        self.natural_base = _common_base([m.ratio for m in self.head + self.tail])

    def marginal_at(self, n):
        if n < len(self.head):
            return self.head[n]
        return self.tail[(n - len(self.head)) % len(self.tail)]

    def _key(self):
        return (self.head, self.tail)

    def __repr__(self):
        return f"CustomSpec(head={[str(m) for m in self.head]}, tail={[str(m) for m in self.tail]})"


@lru_cache(maxsize=None)
def _sparse_marginal(k):
    d = (1 << k) + 1
    return Marginal(Fraction(1, d), Fraction(1 << k, d))


def sparse_p(k):
    """``p_k = 2^(1 + 2 + ... + k)``."""
    return 1 << (k * (k + 1) // 2)


def block_length(k):
    """``n_{k+1} - n_k = p_k^k`` for ``k >= 1``."""
    return 1 << (k * k * (k + 1) // 2)


def _int_log(value, base):
    """Exact ``e`` with ``base**e == value`` for a positive integer, else ``None``."""
    e = 0
    while value % base == 0:
        value //= base
        e += 1
    return e if value == 1 else None


def power_exponent(r, base):
    """Integer ``e`` with ``r == base**e`` exactly."""
    r = Fraction(r)
    if base < 2 or r <= 0:
        raise NotPowerCompatible(f"{r} is not a power of {base}")
    if r >= 1:
        e = _int_log(r.numerator, base) if r.denominator == 1 else None
    else:
        e = _int_log(r.denominator, base) if r.numerator == 1 else None
        e = None if e is None else -e
    if e is None:
        raise NotPowerCompatible(f"{r} is not an integer power of {base}")
    return e


def _integer_roots(g):
    """Integers ``b >= 2`` with ``g`` a power of ``b``, largest first."""
    for e in range(1, g.bit_length() + 1):
        approx = round(g ** (1.0 / e)) if g.bit_length() < 1000 else None
        if approx is None:
            if e == 1:
                yield g
            continue
        for cand in (approx - 1, approx, approx + 1):
            if cand >= 2 and cand**e == g:
                yield cand
                break


def _common_base(ratios):
    """Largest base in which every ratio is an integer power, if any."""
    nontrivial = [r for r in ratios if r != 1]
    if not nontrivial:
        return None
    r = nontrivial[0]
    for b in _integer_roots(r.numerator if r > 1 else r.denominator):
        try:
            for other in nontrivial:
                power_exponent(other, b)
        except NotPowerCompatible:
            continue
        return b
    return None


def make_period_j(j):
    """Residue 0 biased toward 1 with ``(1/j, (j-1)/j)``; other residues toward 0."""
    if not isinstance(j, int) or j < 3:
        raise InvalidParameter(f"period j must be an integer >= 3, got {j!r}")
    hi = Marginal(Fraction(1, j), Fraction(j - 1, j))
    lo = Marginal(Fraction(j - 1, j), Fraction(1, j))
    return PeriodicSpec((hi,) + (lo,) * (j - 1))


def make_sparse(n1=SPARSE_N1):
    return SparseSpec(n1)


def marginal_at(spec, n):
    return spec.marginal_at(n)


def ratio_at(spec, n):
    """``m_n(0) / m_n(1)`` as an exact rational."""
    return spec.marginal_at(n).ratio


@lru_cache(maxsize=4096)
def _marginal_exponent(marginal, base):
    return power_exponent(marginal.ratio, base)


def log_ratio_at(spec, n, base):
    """Integer exponent of ``ratio_at(spec, n)`` in ``base``."""
    return _marginal_exponent(spec.marginal_at(n), base)


def cylinder_measure(spec, prefix):
    """Exact measure of the cylinder of sequences starting with ``prefix``."""
    out = Fraction(1)
    for n, b in enumerate(prefix):
        out *= spec.marginal_at(n).mass(b)
    return out


@lru_cache(maxsize=4096)
def _threshold(marginal):
    return _rng.threshold(marginal.p1)


def bit_from_key(spec, n, key):
    m = spec.marginal_at(n)
    if m.is_fair:
        return _rng.fair_bit(key, n)
    return int(_rng.uniform64(key, n) < _threshold(m))


def sample_bit(spec, n, seed):
    """Deterministic draw of bit ``n`` under ``spec`` for ``seed``."""
    return bit_from_key(spec, n, _rng.seed_key(seed))


def kernel_tables(spec):
    """Per-residue ``(modes, thresholds)`` tables for a periodic spec."""
    modes = [1 if m.is_fair else 0 for m in spec.marginals]
    thresholds = [0 if m.is_fair else _threshold(m) for m in spec.marginals]
    return modes, thresholds


def sparse_partial_sum(K):
    """``sum_{k=1}^K m_{n_k}(0)`` exactly."""
    return sum((Fraction(1, (1 << k) + 1) for k in range(1, K + 1)), Fraction(0))


def oscillating_period3():
    """Hand-written period-3 measure: residue 0 ``(1/3, 2/3)``, others ``(2/3, 1/3)``."""
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    return PeriodicSpec(
        [Marginal(third, two_thirds), Marginal(two_thirds, third), Marginal(two_thirds, third)]
    )
