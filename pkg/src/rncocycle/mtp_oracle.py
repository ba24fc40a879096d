"""Brute-force checks of the Radon-Nikodym identities on cylinder algebras.

Everything is an exact sum over the ``2^d`` cylinders of depth ``d``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .bitspace import BitPrefix
from .cocycle import flip_weight
from .errors import DepthMismatch, IndexOutOfPrefix, InvalidParameter
from .measures import cylinder_measure

MAX_EXHAUSTIVE_DEPTH = 12


def all_prefixes(depth):
    return [BitPrefix(bits) for bits in itertools.product((0, 1), repeat=depth)]


def flip_prefix(c, n):
    bits = list(c)
    bits[n] ^= 1
    return BitPrefix(bits)


def pushforward_cylinder(spec, n, c):
    """``mu(b_n(C))`` for the cylinder ``C`` of prefix ``c``."""
    c = BitPrefix(c)
    if not 0 <= n < len(c):
        raise IndexOutOfPrefix(f"flip index {n} outside prefix of length {len(c)}")
    return cylinder_measure(spec, flip_prefix(c, n))


def rn_derivative_on_cylinder(spec, n, c):
    """``mu(b_n C) / mu(C)``; depends only on the bit of ``c`` at ``n``."""
    return pushforward_cylinder(spec, n, c) / cylinder_measure(spec, c)


def pushforward_residual(spec, n, c):
    """``mu(b_n C) - flip_weight * mu(C)``; zero when the flip formula is right."""
    c = BitPrefix(c)
    return pushforward_cylinder(spec, n, c) - flip_weight(spec, c, n).value * cylinder_measure(spec, c)


@dataclass(frozen=True)
class FlipBijection:
    """Composition of the bit flips at ``flips``, restricted to a cylinder."""

    flips: frozenset
    domain_constraint: BitPrefix = BitPrefix()

    def __init__(self, flips=(), domain_constraint=()):
        object.__setattr__(self, "flips", frozenset(flips))
        object.__setattr__(self, "domain_constraint", BitPrefix(domain_constraint))

    def apply(self, c):
        bits = list(c)
        for n in self.flips:
            bits[n] ^= 1
        return BitPrefix(bits)

    def in_domain(self, c):
        d = self.domain_constraint
        return tuple(c[: len(d)]) == tuple(d)

    def in_image(self, c):
        return self.in_domain(self.apply(c))

    def weight(self, spec, c):
        """Cocycle from ``c`` to ``gamma(c)``, composed one flip at a time."""
        w, y = Fraction(1), c
        for n in sorted(self.flips):
            w *= flip_weight(spec, y, n).value
            y = flip_prefix(y, n)
        return w

    @property
    def max_index(self):
        return max(self.flips | {len(self.domain_constraint) - 1}, default=-1)


@dataclass
class SimpleFunction:
    depth: int
    values: dict

    def __post_init__(self):
        if len(self.values) != 1 << self.depth:
            raise InvalidParameter(f"simple function of depth {self.depth} needs all {1 << self.depth} cylinders")

    @classmethod
    def indicator(cls, prefix, depth):
        prefix = BitPrefix(prefix)
        return cls(depth, {c: Fraction(int(tuple(c[: len(prefix)]) == tuple(prefix))) for c in all_prefixes(depth)})

    def __call__(self, c):
        return self.values[BitPrefix(c)]


@dataclass
class MTPResult:
    case: str
    lhs: Fraction
    rhs: Fraction

    @property
    def residual(self):
        return self.lhs - self.rhs

    @property
    def passed(self):
        return self.residual == 0

    def to_json(self):
        return {
            "case": self.case,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "residual": str(self.residual),
            "pass": self.passed,
        }


def verify_mtp(spec, gamma, g, case=""):
    """Integral of ``g`` over dom(gamma) against the tilted integral over im(gamma)."""
    if gamma.max_index >= g.depth:
        raise DepthMismatch(f"flip bijection reaches index {gamma.max_index} but g has depth {g.depth}")
    lhs = Fraction(0)
    rhs = Fraction(0)
    for c in all_prefixes(g.depth):
        mu = cylinder_measure(spec, c)
        if gamma.in_domain(c):
            lhs += g(c) * mu
        if gamma.in_image(c):
            rhs += g(gamma.apply(c)) * gamma.weight(spec, c) * mu
    return MTPResult(case, lhs, rhs)


def random_simple_function(rng, depth):
    return SimpleFunction(
        depth, {c: Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for c in all_prefixes(depth)}
    )


def random_case(rng, max_depth=8, max_flips=3):
    depth = rng.randint(1, max_depth)
    flips = rng.sample(range(depth), rng.randint(0, min(max_flips, depth)))
    constraint = [rng.randint(0, 1) for _ in range(rng.randint(0, depth))]
    return FlipBijection(flips, constraint), random_simple_function(rng, depth)


def randomized_mtp(specs, cases, seed=0, max_depth=8, max_flips=3):
    """``cases`` random (bijection, function) pairs, cycled over ``specs``."""
    rng = random.Random(seed)
    out = []
    for i in range(cases):
        name, spec = specs[i % len(specs)]
        gamma, g = random_case(rng, max_depth, max_flips)
        out.append(verify_mtp(spec, gamma, g, case=f"mtp-random-{i}-{name}"))
    return out


def exhaustive_mtp(specs, depth=4, seed=0):
    """Every flip set and every cylinder domain constraint at ``depth``."""
    rng = random.Random(seed)
    out = []
    for name, spec in specs:
        g = random_simple_function(rng, depth)
        for r in range(depth + 1):
            for flips in itertools.combinations(range(depth), r):
                for clen in range(depth + 1):
                    for constraint in itertools.product((0, 1), repeat=clen):
                        gamma = FlipBijection(flips, constraint)
                        tag = f"mtp-exhaustive-{name}-f{''.join(map(str, flips))}-c{''.join(map(str, constraint))}"
                        out.append(verify_mtp(spec, gamma, g, case=tag))
    return out


def exhaustive_pushforward(specs, depth=6):
    """Residual of the flip formula for every ``n < depth`` and depth-``depth`` cylinder."""
    if depth > MAX_EXHAUSTIVE_DEPTH:
        raise InvalidParameter(f"exhaustive depth capped at {MAX_EXHAUSTIVE_DEPTH}")
    out = []
    for name, spec in specs:
        for c in all_prefixes(depth):
            for n in range(depth):
                image = pushforward_cylinder(spec, n, c)
                predicted = flip_weight(spec, c, n).value * cylinder_measure(spec, c)
                out.append(MTPResult(f"pushforward-{name}-n{n}-{c}", image, predicted))
    return out
