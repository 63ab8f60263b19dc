"""Deterministic random streams.

Every replicate gets its own ``numpy.random.Generator`` backed by the
counter-based Philox bit generator.  The Philox key is derived from the
base seed and the replicate index with a 64-bit multiply-xor-shift mixer
(the SplitMix64 finalizer), so replicate ``r`` sees the same stream no
matter how replicates are scheduled across workers.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def stream_key(base_seed: int, index: int) -> int:
    return mix64((base_seed & MASK64) + (index + 1) * GOLDEN)


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a single seeded computation (stream index 0)."""
    return replicate_rng(seed, 0)


def replicate_rng(base_seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(base_seed, index)))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, an int seed, or any object with the Generator API."""
    if isinstance(rng, (int, np.integer)):
        return make_rng(int(rng))
    if rng is None:
        raise ValueError("an explicit seed or generator is required")
    return rng
