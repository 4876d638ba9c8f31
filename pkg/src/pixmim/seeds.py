"""Stable 64-bit seed derivation for reproducible, shard-independent runs.

Per-image seeds are a splitmix64 chain over (base_seed, image_index, ...),
pure integer math, so parallel shards reproduce serial runs bit for bit on
any platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1

# Sub-stream tags for the independent draws made per sample.
STREAM_AUGMENT = 1
STREAM_MASK = 2


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(*parts: int) -> int:
    """Mix integers into one 64-bit seed; order-sensitive and stable."""
    state = 0x243F6A8885A308D3  # nothing-up-my-sleeve start
    for p in parts:
        state = _splitmix64(state ^ (p & _MASK))
    return state


def sample_seed(base_seed: int, index: int) -> int:
    """The per-image seed used by batch runs for the image at ``index``."""
    return derive_seed(base_seed, index)
