"""
Seeded, splittable random streams.

Every stream is a numpy ``Generator`` driven by PCG64 and seeded by
``SeedSequence(seed, spawn_key=(stream,))``. The same (seed, stream, number of
draws) always reproduces the same values, and batch work is split into
chunks whose stream index is the chunk number.
"""
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Tuple

import numpy as np

from plancherel_stein.errors import ArgumentError, InvariantViolation


GENERATOR_NAME = "numpy.random.PCG64"
PROBABILITY_TOLERANCE = 1e-12


@dataclass
class SeededStream:
    """A deterministic random stream identified by (seed, stream)."""

    seed: int
    stream: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.seed < 0 or self.stream < 0:
            raise ArgumentError(f"seed and stream must be non-negative, got {self.seed}, {self.stream}")
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def uniform(self) -> float:
        return float(self.generator.random())

    def choose(self, probabilities: Sequence[float]) -> int:
        """Index drawn from ``probabilities``; they must already sum to 1."""
        total = float(np.sum(probabilities))
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise InvariantViolation("transition probabilities sum to 1", f"sum={total!r}")
        cumulative = np.cumsum(probabilities)
        index = int(np.searchsorted(cumulative, self.uniform() * total, side="right"))
        return min(index, len(probabilities) - 1)

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of 1..n (Fisher-Yates on this stream)."""
        return self.generator.permutation(n) + 1


def split(seed: int, count: int, chunk_size: int) -> Iterator[Tuple[int, int, SeededStream]]:
    """Yield (start, size, stream) chunks covering ``count`` draws."""
    if chunk_size < 1:
        raise ArgumentError(f"chunk_size must be positive, got {chunk_size}")
    for index, start in enumerate(range(0, count, chunk_size)):
        yield start, min(chunk_size, count - start), SeededStream(seed, index)
