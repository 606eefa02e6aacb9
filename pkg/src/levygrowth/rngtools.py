"""Seed derivation for reproducible, parallelizable Monte Carlo streams.

Replicate ``r`` of a suite seeded with ``seed`` always draws from
``default_rng(mix_seed(seed, r))``, so replicates can run in any order or
concurrently and still reproduce bit-for-bit.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15  # golden-ratio increment of splitmix64


def _splitmix64(z):
    z = (z + _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_seed(seed, stream):
    """Derive a 64-bit sub-stream seed from (seed, stream index).

    Two splitmix64 finalization rounds on ``seed xor (stream * gamma)``;
    distinct streams decorrelate even for adjacent seeds.
    """
    x = (int(seed) & _MASK64) ^ ((int(stream) * _GAMMA) & _MASK64)
    return _splitmix64(_splitmix64(x))


def replicate_rng(seed, replicate):
    """Generator for one Monte Carlo replicate."""
    return np.random.default_rng(mix_seed(seed, replicate))
