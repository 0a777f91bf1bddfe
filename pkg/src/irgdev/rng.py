"""Deterministic stream derivation for parallel replicas.

Every stochastic operation takes a seed that is either a plain int (master
seed, stream 0) or a RandomSeed.  Replica r of an experiment derives its
generator from (master, r, ...) via SeedSequence spawn keys, so results are
independent of worker count and scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RandomSeed:
    """A (master seed, stream index) pair identifying one random stream."""

    master: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.master, spawn_key=(self.stream,))
        )


def as_generator(seed) -> np.random.Generator:
    """Accept an int, (master, *stream) tuple, RandomSeed, or Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RandomSeed):
        return seed.generator()
    if isinstance(seed, (int, np.integer)):
        return RandomSeed(int(seed)).generator()
    if isinstance(seed, tuple) and seed and all(isinstance(x, (int, np.integer)) for x in seed):
        return stream_generator(seed[0], *seed[1:])
    raise TypeError(f"unsupported seed type: {type(seed)!r}")


def stream_generator(master: int, *key: int) -> np.random.Generator:
    """Generator for a derived stream, e.g. stream_generator(seed, size_idx, replica)."""
    return np.random.default_rng(
        np.random.SeedSequence(int(master), spawn_key=tuple(int(x) for x in key))
    )
