"""Seed derivation shared by every randomized operation.

A task's random stream depends only on the master seed and the task's key
tuple, never on execution order. Keys are mixed with numpy's
``SeedSequence`` (hash-based entropy pool), so ``(seed, 3, 0)`` and
``(seed, 0, 3)`` give unrelated streams.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep streams of different operations apart.
BLOCK_SHUFFLE = 1
SCRAMBLE = 2
SURROGATE_SEED = 3

MASK64 = (1 << 64) - 1


def generator(seed: int, *keys: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for ``keys``."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def fisher_yates(k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random permutation of ``range(k)`` (Durstenfeld's in-place shuffle)."""
    perm = np.arange(k)
    # numpy's shuffle is Fisher-Yates driven by the generator's bounded integers
    rng.shuffle(perm)
    return perm
