"""Seeded generator streams.

Streams are addressed by a master seed plus an integer path, e.g.
``(i, j, block)`` for Monte Carlo blocks of measurement pair (i, j). The
same address always yields the same stream regardless of thread count.
"""
import numpy as np


def derive_generator(seed: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(path)))


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Independent integer seeds for restarts or campaign rows."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]
