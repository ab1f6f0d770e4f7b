"""Counter-based random streams derived from a single run seed."""

import zlib

import numpy as np

_SEED_MASK = (1 << 64) - 1


def _key(part: str | int) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part) & 0xFFFFFFFF


def stream(seed: int, *keys: str | int) -> np.random.Generator:
    """Return an independent generator for the key path under ``seed``.

    Draws depend only on ``(seed, keys)``, so the order in which streams are
    requested never changes what each one produces.
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed) & _SEED_MASK, spawn_key=tuple(_key(k) for k in keys)
    )
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *keys: str | int) -> int:
    """Derive a child 64-bit seed for the key path."""
    sequence = np.random.SeedSequence(
        entropy=int(seed) & _SEED_MASK, spawn_key=tuple(_key(k) for k in keys)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
