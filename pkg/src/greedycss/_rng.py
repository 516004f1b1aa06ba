"""Seeded generator substreams.

Every random draw in the package goes through :func:`substream` so that a
(master seed, purpose, index...) key always maps to the same stream,
independently of the order in which other streams were consumed.
"""
import zlib

import numpy as np


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def substream(seed, *parts):
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                spawn_key=tuple(_key(p) for p in parts))
    return np.random.Generator(np.random.PCG64(ss))
