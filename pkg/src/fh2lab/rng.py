"""Counter-based, splittable random streams.

Every random draw in the package comes from a Philox4x64-10 generator whose
128-bit key is a BLAKE2b digest of ``(seed, label, index)``.  Two streams with
different labels or indices never share state, and a stream depends only on
its key, so results do not depend on evaluation order or worker count.
"""
from __future__ import annotations

import hashlib

import numpy as np

GENERATOR_ID = "philox4x64-10/blake2b-128(seed,label,index)"

_MASK64 = (1 << 64) - 1


def _key(seed: int, label: str, index: int) -> np.ndarray:
    if not 0 <= seed <= _MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    h = hashlib.blake2b(digest_size=16, person=b"fh2lab-stream")
    h.update(seed.to_bytes(8, "little"))
    h.update(index.to_bytes(8, "little", signed=False))
    h.update(label.encode("utf-8"))
    return np.frombuffer(h.digest(), dtype="<u8").astype(np.uint64)


def bit_generator(seed: int, label: str, index: int = 0) -> np.random.Philox:
    """Raw Philox bit generator for the sub-stream ``(seed, label, index)``."""
    return np.random.Philox(key=_key(int(seed), label, int(index)))


def stream(seed: int, label: str, index: int = 0) -> np.random.Generator:
    """A numpy ``Generator`` on the sub-stream ``(seed, label, index)``."""
    return np.random.Generator(bit_generator(seed, label, index))


def random_words(seed: int, label: str, index: int, shape) -> np.ndarray:
    """Uniform 64-bit words; every bit is an independent fair coin."""
    bg = bit_generator(seed, label, index)
    size = int(np.prod(shape))
    return bg.random_raw(size).astype(np.uint64, copy=False).reshape(shape)


def derive_seed(seed: int, label: str, index: int = 0) -> int:
    """A child seed, for handing to a function that takes its own seed."""
    return int(bit_generator(seed, label, index).random_raw())
