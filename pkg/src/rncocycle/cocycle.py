"""Radon-Nikodym cocycle of the least-deletion orbit relation.

For a product measure the cocycle across a single bit flip at ``n`` is
``(1 - m_n(x_n)) / m_n(x_n)``; composing along the forward geodesic gives a
product of ``m(0)/m(1)`` over the consumed ones.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

from .bitspace import bit_flip, forward_geodesic, iterate, ones_positions
from .errors import NotPowerCompatible
from .measures import log_ratio_at, power_exponent, ratio_at


@dataclass(frozen=True)
class CocycleValue:
    value: Fraction
    base: int | None = None
    log_base_b: int | None = None

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError("cocycle values are positive")
        if self.log_base_b is not None and Fraction(self.base) ** self.log_base_b != self.value:
            raise ValueError(f"{self.value} != {self.base}^{self.log_base_b}")

    @classmethod
    def of(cls, value, base=None):
        value = Fraction(value)
        if base is None:
            return cls(value)
        try:
            return cls(value, base, power_exponent(value, base))
        except NotPowerCompatible:
            return cls(value)

    def __mul__(self, other):
        if not isinstance(other, CocycleValue):
            return NotImplemented
        if self.base is not None and self.base == other.base:
            return CocycleValue(self.value * other.value, self.base, self.log_base_b + other.log_base_b)
        return CocycleValue(self.value * other.value)

    def __eq__(self, other):
        if isinstance(other, CocycleValue):
            return self.value == other.value
        return self.value == other

    def __hash__(self):
        return hash(self.value)


ONE = CocycleValue(Fraction(1))


def flip_weight(spec, x, n):
    """Cocycle across ``b_n``: ``(1 - m_n(x_n)) / m_n(x_n)``."""
    mass = spec.marginal_at(n).mass(x.bit(n))
    return CocycleValue.of((1 - mass) / mass, spec.natural_base)


def geodesic_cocycle(spec, x, k):
    """Cocycle from ``x`` to ``f^k(x)`` by the product formula over the first ``k`` ones."""
    ones = ones_positions(x, k)
    base = spec.natural_base
    if base is not None:
        e = sum(log_ratio_at(spec, n, base) for n in ones)
        return CocycleValue(Fraction(base) ** e, base, e)
    value = Fraction(1)
    for n in ones:
        value *= ratio_at(spec, n)
    return CocycleValue(value)


def composed_cocycle(spec, x, k):
    """Same quantity, composed step by step from single-flip weights along the orbit."""
    w = CocycleValue.of(1, spec.natural_base)
    y = x
    for step in forward_geodesic(x, k):
        w = w * flip_weight(spec, y, step.flipped_position)
        y = bit_flip(y, step.flipped_position)
    return w


def lazy_cocycle_sequence(spec, x, k):
    """``[C~_0, ..., C~_k]``: multiply in ``ratio_at(i)`` whenever ``x_i = 1``."""
    out = [Fraction(1)]
    for i in range(k):
        out.append(out[-1] * ratio_at(spec, i) if x.bit(i) else out[-1])
    return out


def lazy_cocycle(spec, x, k):
    return CocycleValue.of(lazy_cocycle_sequence(spec, x, k)[-1], spec.natural_base)


def log_walk(spec, x, steps, base=None):
    """Integer walk ``L_i = log_base C~_i`` for ``i = 0..steps``.

    Raises :class:`NotPowerCompatible` if a ratio met along the way is not an
    integer power of ``base``.
    """
    base = base or spec.natural_base
    if base is None:
        raise NotPowerCompatible(f"{spec!r} has no base in which all ratios are integer powers")
    out = [0]
    for i in range(steps):
        out.append(out[-1] + log_ratio_at(spec, i, base) if x.bit(i) else out[-1])
    return out


def chain_rule_check(spec, x, k, m):
    """``w(x, f^{k+m} x) == w(x, f^k x) * w(f^k x, f^{k+m} x)`` exactly."""
    lhs = geodesic_cocycle(spec, x, k + m)
    rhs = geodesic_cocycle(spec, x, k) * geodesic_cocycle(spec, iterate(x, k), m)
    return lhs.value == rhs.value


def _prefix_products(spec, ones):
    out = [Fraction(1)]
    for n in ones:
        out.append(out[-1] * ratio_at(spec, n))
    return out


def chain_rule_table(spec, x, kmax, mmax):
    """Check the cocycle identity for every ``k <= kmax``, ``m <= mmax`` in one orbit pass.

    Returns the list of failing ``(k, m)`` pairs (empty when the identity holds).
    Each orbit point ``f^k x`` is produced by the least-deletion map and read
    through its own bits.
    """
    from_x = _prefix_products(spec, ones_positions(x, kmax + mmax))
    failures = []
    y = x
    for k in range(kmax + 1):
        if k:
            y = iterate(y, 1)
        from_y = _prefix_products(spec, ones_positions(y, mmax))
        for m in range(mmax + 1):
            if from_x[k + m] != from_x[k] * from_y[m]:
                failures.append((k, m))
    return failures


def decimal_str(q, digits=30):
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(q.numerator) / Decimal(q.denominator))


@dataclass
class TraceEntry:
    k: int
    flipped_position: int | None
    value: CocycleValue


@dataclass
class GeodesicTrace:
    start: object
    entries: list = field(default_factory=list)
    partial_sum: Fraction = Fraction(0)

    CSV_COLUMNS = (
        "k",
        "flipped_position",
        "value_numerator",
        "value_denominator",
        "log_value_if_dyadic",
        "partial_sum",
    )

    def partial_sums(self):
        out, s = [], Fraction(0)
        for e in self.entries[1:]:
            s += e.value.value
            out.append(s)
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        s = Fraction(0)
        for e in self.entries:
            if e.k > 0:
                s += e.value.value
            w.writerow(
                [
                    e.k,
                    "" if e.flipped_position is None else e.flipped_position,
                    e.value.value.numerator,
                    e.value.value.denominator,
                    "" if e.value.log_base_b is None else e.value.log_base_b,
                    decimal_str(s),
                ]
            )
        return buf.getvalue()


def geodesic_trace(spec, x, k):
    """Per-step cocycle values ``w(x, f^i x)`` for ``i = 0..k``.

    Row 0 is the start point with value 1. ``partial_sum`` adds the values
    for ``i = 1..k``.
    """
    trace = GeodesicTrace(start=x)
    w = CocycleValue.of(1, spec.natural_base)
    trace.entries.append(TraceEntry(0, None, w))
    for n in ones_positions(x, k):
        w = w * CocycleValue.of(ratio_at(spec, n), spec.natural_base)
        trace.entries.append(TraceEntry(len(trace.entries), n, w))
        trace.partial_sum += w.value
    return trace
