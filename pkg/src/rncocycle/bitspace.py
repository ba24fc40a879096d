"""Points of Cantor space, bit flips and the least-deletion map.

A :class:`BitSequence` is an explicit finite prefix followed by a lazy tail
drawn from a measure. Tail bits are pure functions of ``(seed, n, marginal)``,
so they can be queried in any order and never need to be stored; the cache
here only avoids recomputing hashes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from . import _rng
from .errors import CapExceeded, InvalidParameter
from .measures import bit_from_key

DEFAULT_CAP = 1 << 26


class BitPrefix(tuple):
    """Finite tuple of bits; the empty prefix stands for the whole space."""

    def __new__(cls, bits=()):
        if isinstance(bits, str):
            bits = parse_prefix(bits)
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise InvalidParameter(f"prefix bits must be 0 or 1: {bits}")
        return super().__new__(cls, bits)

    def bit(self, n):
        return self[n]

    def __str__(self):
        return "".join(map(str, self))


def parse_prefix(text):
    text = text.strip().replace(" ", "").replace("_", "")
    if any(c not in "01" for c in text):
        raise InvalidParameter(f"prefix literal must be over {{0,1}}: {text!r}")
    return tuple(int(c) for c in text)


def parse_seed(text):
    """Decimal or ``0x`` hex unsigned 64-bit seed."""
    if isinstance(text, int):
        value = text
    else:
        text = text.strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text, 10)
    if not 0 <= value <= _rng.MASK64:
        raise InvalidParameter(f"seed out of unsigned 64-bit range: {text}")
    return value


class _Tail:
    """Shared memo of lazily drawn tail bits for one ``(seed, measure)``."""

    def __init__(self, seed, measure):
        self.key = _rng.seed_key(seed)
        self.measure = measure
        self._bits = bytearray()
        self._lock = threading.Lock()

    def bit(self, n):
        bits = self._bits
        if n < len(bits):
            return bits[n]
        if n > len(bits) + 4096:
            return bit_from_key(self.measure, n, self.key)
        with self._lock:
            for i in range(len(self._bits), n + 1):
                self._bits.append(bit_from_key(self.measure, i, self.key))
        return self._bits[n]

    @property
    def frontier(self):
        return len(self._bits)


@dataclass(frozen=True)
class GeodesicStep:
    step_index: int
    flipped_position: int


class BitSequence:
    """A point of ``2^N`` with infinitely many ones (almost surely).

    ``flips`` holds indices toggled relative to prefix+tail, which keeps
    :func:`bit_flip` an exact involution and lets images of the
    least-deletion map share their parent's tail memo.
    """

    __slots__ = ("prefix", "seed", "measure", "cap", "flips", "_tail")

    def __init__(self, prefix=(), seed=0, measure=None, cap=DEFAULT_CAP, *, flips=frozenset(), _tail=None):
        if measure is None:
            raise InvalidParameter("a BitSequence needs a measure for its tail")
        self.prefix = BitPrefix(prefix)
        self.seed = parse_seed(seed)
        self.measure = measure
        self.cap = cap
        self.flips = frozenset(flips)
        self._tail = _tail if _tail is not None else _Tail(self.seed, measure)

    def _derive(self, flips):
        return BitSequence(self.prefix, self.seed, self.measure, self.cap, flips=flips, _tail=self._tail)

    def bit(self, n):
        if n < 0:
            raise IndexError(n)
        b = self.prefix[n] if n < len(self.prefix) else self._tail.bit(n)
        return b ^ 1 if n in self.flips else b

    __getitem__ = bit

    def bits(self, start, stop):
        return [self.bit(n) for n in range(start, stop)]

    @property
    def generated_upto(self):
        return max(len(self.prefix), self._tail.frontier)

    def agrees_with(self, other, start, stop):
        """Equality over ``[start, stop)``; whole-sequence equality is not defined."""
        return all(self.bit(n) == other.bit(n) for n in range(start, stop))

    def next_one(self, start):
        """Smallest ``n >= start`` with bit 1."""
        n = start
        while n < self.cap:
            if self.bit(n):
                return n
            n += 1
        raise CapExceeded(self.cap)

    def __repr__(self):
        return (
            f"BitSequence(prefix='{self.prefix}', seed={self.seed}, measure={self.measure!r}, "
            f"flips={sorted(self.flips)})"
        )


def first_one_index(x):
    return x.next_one(0)


def bit_flip(x, n):
    return x._derive(x.flips ^ {n})


def least_deletion(x):
    """Flip the first 1 of ``x`` to 0."""
    return bit_flip(x, first_one_index(x))


def ones_positions(x, k):
    """First ``k`` indices where ``x`` is 1, increasing."""
    out = []
    n = 0
    while len(out) < k:
        n = x.next_one(n)
        out.append(n)
        n += 1
    return out


def forward_geodesic(x, k):
    """Positions flipped by the first ``k`` applications of the least-deletion map."""
    steps = []
    y = x
    for i in range(k):
        n = first_one_index(y)
        steps.append(GeodesicStep(i + 1, n))
        y = bit_flip(y, n)
    return steps


def iterate(x, k):
    """``f^k(x)``."""
    for _ in range(k):
        x = least_deletion(x)
    return x
