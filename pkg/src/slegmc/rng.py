"""Counter-based random streams for reproducible parallel Monte Carlo.

Every sampler in this package draws from a ``RandomStream``: a
(master_seed, stream_index) pair mapped onto a Philox counter-based
generator.  Distinct stream indices get disjoint 2^128 counter blocks of
the same keyed Philox cipher, so replicas are statistically independent
and can be generated in any order or in parallel while staying
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_MASK128 = (1 << 128) - 1

# spawn() packs child indices into the low bits of the parent index; with
# 24 bits per level the counter block stays within Philox's 256-bit counter
# for several levels of nesting.
_SPAWN_BITS = 24
_SPAWN_MAX = (1 << _SPAWN_BITS) - 2


@dataclass(frozen=True)
class RandomStream:
    """A deterministic, splittable source of randomness."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.stream_index <= _MASK128:
            raise ValueError("stream_index out of range")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream's block."""
        bitgen = np.random.Philox(
            key=self.master_seed & _MASK128,
            counter=(self.stream_index & _MASK128) << 128,
        )
        return np.random.Generator(bitgen)

    def spawn(self, child: int) -> "RandomStream":
        """Derive an independent child stream (child in [0, 2^24 - 2))."""
        if not 0 <= child <= _SPAWN_MAX:
            raise ValueError("child index out of range")
        idx = ((self.stream_index << _SPAWN_BITS) | (child + 1)) & _MASK128
        return RandomStream(self.master_seed, idx)


def stable_sum(values) -> float:
    """Order-insensitive compensated sum (exact rounding via fsum)."""
    return math.fsum(float(v) for v in values)
