"""Deterministic counter-based random streams.

Every random draw in this package comes from a Philox counter-based
generator keyed by (seed, lane, step).  Philox produces identical output
for identical keys on every platform, so a whole run is a pure function
of its seed.  Lanes keep independent consumers (per-register movement,
observation, selection, node placement) from sharing a stream: drawing
in one lane never shifts the sequence seen by another, which is what
makes per-pair work order-independent.

Lane numbers below 2**31 are reserved for register ids; the engine and
harness use the named lanes at the top of the 32-bit range.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1

# Reserved lanes (register ids stay < 2**31 and can never collide).
LANE_OBSERVE = _MASK32
LANE_SELECT = _MASK32 - 1
LANE_PLACEMENT = _MASK32 - 2


def stream(seed: int, lane: int, step: int = 0) -> np.random.Generator:
    """Return a fresh generator for the (seed, lane, step) substream.

    The 128-bit Philox key packs the 64-bit seed in the low word and
    (lane, step) in the high word, so distinct triples give statistically
    independent, reproducible streams.
    """
    if seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed}")
    key = (seed & _MASK64) | ((lane & _MASK32) << 64) | ((step & _MASK32) << 96)
    return np.random.Generator(np.random.Philox(key=key))
