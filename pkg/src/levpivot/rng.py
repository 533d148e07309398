"""Reproducible random streams.

Every randomized routine takes an explicit :class:`RngState`.  The pair
``(seed, stream)`` keys a Philox counter-based generator, so trials that run
in parallel can use disjoint streams of the same seed.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngState:
    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if self.stream < 0:
            raise ValueError(f"stream must be non-negative, got {self.stream}")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, offset: int) -> "RngState":
        return RngState(self.seed, self.stream + offset)


def as_generator(rng) -> np.random.Generator:
    """Accept an RngState, an int seed or a ready Generator."""
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngState(int(rng)).generator()
