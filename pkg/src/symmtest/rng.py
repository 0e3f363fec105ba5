"""Reproducible random-number streams.

All stochastic code in this package draws from streams derived here.  A
stream is identified by a root seed plus a path of integers (for example
``(seed, replication_index)``), hashed through ``numpy.random.SeedSequence``.
Streams with distinct paths are statistically independent, and the mapping
from (seed, path) to stream is fixed, so results do not depend on execution
order or on how work is split across workers.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "rademacher_signs"]


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the stream identified by ``seed`` and ``path``.

    Identical (seed, path) pairs always yield identical streams; distinct
    paths yield independent streams.
    """
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path)))


def rademacher_signs(rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n independent signs, -1 or +1 with equal probability."""
    return rng.integers(0, 2, size=n) * 2 - 1
