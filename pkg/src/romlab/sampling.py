"""Seeded, named random sub-streams.

Every consumer draws from ``substream(seed, name)``; the name is hashed into the
spawn key so distinct uses of one manifest seed never share a stream.
"""
from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(zlib.crc32(name.encode()),))
    return np.random.Generator(np.random.Philox(ss))


def sample_integers(seed: int, name: str, lo: int, hi: int, count: int) -> list[int]:
    """``count`` integers drawn uniformly from [lo, hi], as Python ints."""
    rng = substream(seed, name)
    return [int(v) for v in rng.integers(lo, hi, size=count, endpoint=True, dtype=np.int64)]
