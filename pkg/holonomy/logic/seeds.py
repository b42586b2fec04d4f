# holonomy/logic/seeds.py
from __future__ import annotations

import zlib

import numpy as np


def sub_seed(seed: int, name: str) -> np.random.SeedSequence:
    """Named child of the run seed; the name is hashed with CRC-32 so any language can reproduce it."""
    return np.random.SeedSequence(int(seed), spawn_key=(zlib.crc32(name.encode("utf-8")),))


def named_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(sub_seed(seed, name))


def uniform_coords(rng: np.random.Generator, samples: int, dim: int) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(int(samples), int(dim)))
