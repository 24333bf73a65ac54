"""Seed derivation and generator construction.

All randomness goes through PCG64 (numpy's default bit generator, a fixed,
documented algorithm). Child seeds are derived with ``SeedSequence`` so a
(master seed, key...) tuple always maps to the same 64-bit seed, on any
platform and in any execution order.
"""

import numpy as np

DEFAULT_SEED = 20200531
_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *keys: int) -> int:
    """Deterministically hash ``master`` and ``keys`` into a new 64-bit seed."""
    ss = np.random.SeedSequence(entropy=int(master) & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
