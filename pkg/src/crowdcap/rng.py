"""Seeded random stream shared by scenario materialization and the run loop.

The stream is a numpy PCG64 bit generator. The compiled kernel pulls doubles
from the same bit generator through numpy's C API, so both backends see the
identical sequence for a given seed.
"""

from __future__ import annotations

import numpy as np


class RandomStream:
    """Uniform [0, 1) doubles from a seeded PCG64 generator, counting draws."""

    def __init__(self, seed: int):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
        self.seed = int(seed)
        self.bit_generator = np.random.PCG64(self.seed)
        self._gen = np.random.Generator(self.bit_generator)
        self.draws = 0

    def random(self) -> float:
        self.draws += 1
        return float(self._gen.random())

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()
