"""Seed derivation for replica streams.

Every replica gets its own ``numpy.random.Generator`` built from a 64-bit
seed derived as::

    derive_seed(base, i) = splitmix64(splitmix64(base) ^ (i * 0x9E3779B97F4A7C15 mod 2**64))

where ``splitmix64`` is the standard finalizer of Steele, Lea & Flood's
SplitMix64 generator. The map is fixed; changing it changes every frozen
golden value in the test-suite.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    """64-bit seed for replica ``index`` of an ensemble seeded with ``base_seed``."""
    if base_seed < 0 or index < 0:
        raise ValueError("seeds and replica indices must be non-negative")
    return splitmix64(splitmix64(base_seed & _MASK) ^ ((index * _GOLDEN) & _MASK))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def replica_rng(base_seed: int, index: int) -> np.random.Generator:
    return make_rng(derive_seed(base_seed, index))
