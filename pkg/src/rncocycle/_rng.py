"""Counter-mode 64-bit hashing used for every random bit in the package.

A bit at index ``n`` of a sequence with seed ``s`` is a pure function of
``(s, n, marginal)``, so lazy tails can be read in any order. The compiled
kernels and the numpy fallback reproduce these functions exactly.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
FAIR_TAG = 0xD1B54A32D192ED03
HALF = 1 << 63


def fmix64(z):
    """SplitMix64 finalizer (a bijection on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def seed_key(seed):
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return fmix64(seed + GOLDEN)


def _limbs(n):
    if n < 0:
        raise ValueError("index must be non-negative")
    if n <= MASK64:
        return (n,)
    out = []
    while n:
        out.append(n & MASK64)
        n >>= 64
    return tuple(out)


def uniform64(key, n):
    """Uniform 64-bit word for index ``n`` (arbitrary size) under ``key``."""
    h = key
    for limb in _limbs(n):
        h = fmix64(h ^ fmix64(limb + GOLDEN))
    return h


def fair_word(key, w):
    """64 fair bits covering indices ``64*w .. 64*w + 63``."""
    return uniform64(key ^ FAIR_TAG, w)


def fair_bit(key, n):
    return (fair_word(key, n >> 6) >> (n & 63)) & 1


def threshold(p1):
    """Smallest integer t with ``u < t  <=>  u < p1 * 2**64`` for integer u."""
    num, den = p1.numerator, p1.denominator
    return -((-num << 64) // den)


def split_seeds(master, count):
    """SplitMix64 stream of child seeds derived from ``master``."""
    return [fmix64(master + (i + 1) * GOLDEN) for i in range(count)]
