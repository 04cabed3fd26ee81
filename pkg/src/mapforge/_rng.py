"""Seed handling.

Every random quantity in the package is drawn from a :class:`numpy.random.Generator`
backed by PCG64.  A run is driven by one unsigned 64-bit seed; sample ``i`` of a
batch uses the stream seed ``seed XOR splitmix64(i)`` where ``splitmix64`` is the
standard finaliser below (state ``i``, one output).  This makes batch output
independent of how samples are scheduled across threads.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One output of the SplitMix64 generator started from state ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed > MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream_seed(seed: int, index: int) -> int:
    """Seed of stream ``index`` derived from the run seed."""
    return check_seed(seed) ^ splitmix64(int(index))


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Accept a seed, an existing generator, or ``None`` (seed 0)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(check_seed(0 if seed is None else seed)))


def stream_rng(seed: int, index: int) -> np.random.Generator:
    return make_rng(stream_seed(seed, index))
