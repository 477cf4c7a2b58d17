"""
Seeded pseudo-random stream used for every generated instance.

The recurrence is SplitMix64 (Steele, Lea & Flood), spelled out below so
that another implementation can reproduce the same numbers:

    state  <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z      <- state
    z      <- ((z xor (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2^64
    z      <- ((z xor (z >> 27)) * 0x94D049BB133111EB) mod 2^64
    output <- z xor (z >> 31)

uniform():   (output >> 11) * 2^-53, a double in [0, 1)
normals:     Box-Muller on consecutive uniforms u1, u2 with
             r = sqrt(-2 ln(1 - u1)); the pair (r cos 2 pi u2, r sin 2 pi u2)
             is emitted cosine first. Arrays are filled in row-major order.
"""

import math
from typing import Optional, Union

import numpy as np

from src.errors import UsageError

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


class SplitMix64:
    """SplitMix64 stream with a numpy-Generator-like standard_normal()."""

    def __init__(self, seed: int):
        if seed < 0:
            raise UsageError(f"seed must be an unsigned integer, got {seed}")
        self.state = seed & MASK64
        self._spare: Optional[float] = None

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX_1) & MASK64
        z = ((z ^ (z >> 27)) * MIX_2) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def _normal(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()  # (0, 1]
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def standard_normal(self, size: Union[None, int, tuple] = None):
        if size is None:
            return self._normal()
        shape = (size,) if isinstance(size, int) else tuple(size)
        count = int(np.prod(shape)) if shape else 1
        return np.array([self._normal() for _ in range(count)], dtype=float).reshape(shape)
