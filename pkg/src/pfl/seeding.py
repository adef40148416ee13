"""Deterministic seed derivation.

Every random consumer draws from its own stream derived from the run seed,
a stream name and a counter, so adding a new diagnostic or reordering
ensemble members never perturbs the numbers another consumer sees.

The derivation is (seed, crc32(stream_name), counter) fed to numpy's
SeedSequence; crc32 keeps the name hashing stable across processes and
platforms (unlike the builtin hash).
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed_sequence(seed: int, stream: str, counter: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        (int(seed) & _MASK64, zlib.crc32(stream.encode("utf-8")), int(counter))
    )


def stream_rng(seed: int, stream: str, counter: int = 0) -> np.random.Generator:
    """Generator for one (seed, stream, counter) triple."""
    return np.random.default_rng(derive_seed_sequence(seed, stream, counter))


def stream_seed(seed: int, stream: str, counter: int = 0) -> int:
    """A derived 63-bit integer seed, for builders that take a plain seed."""
    return int(derive_seed_sequence(seed, stream, counter).generate_state(1, np.uint64)[0] >> 1)
