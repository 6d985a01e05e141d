"""Counter-based SplitMix64 streams.

Output ``k`` (0-based) of a stream with 64-bit state ``s`` is
``mix(s + (k + 1) * GOLDEN)``, identical to the classic sequential SplitMix64
seeded with ``s``. The counter form lets any slice of a stream be generated
directly, so frames can be produced out of order and in parallel.

Reference vector: seed 1234567 gives 6457827717110365317,
3203168211198807973, 9817491932198370423, ...
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# stream ids for derived substreams
TREMOR_X = 1
TREMOR_Y = 2
NOISE = 3


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential scalar generator, kept as the readable reference."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)


def substream(seed: int, stream_id: int) -> int:
    """State of a derived stream: output ``stream_id - 1`` of the parent seed."""
    return mix64((seed & MASK64) + stream_id * GOLDEN)


def uint64s(state: int, start: int, count: int) -> np.ndarray:
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state & MASK64) + k * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def uniforms(state: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits."""
    return (uint64s(state, start, count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def normals(state: int, start: int, count: int) -> np.ndarray:
    """Standard normals by Box-Muller; normal ``k`` consumes uniforms ``2k`` and ``2k+1``."""
    raw = uint64s(state, 2 * start, 2 * count) >> np.uint64(11)
    u1 = (raw[0::2].astype(np.float64) + 1.0) * 2.0 ** -53
    u2 = raw[1::2].astype(np.float64) * 2.0 ** -53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
