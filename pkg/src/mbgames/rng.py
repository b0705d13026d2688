from __future__ import annotations

import numpy as np

MAKER_STREAM = 1
BREAKER_STREAM = 2

_MASK64 = (1 << 64) - 1


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=tuple(stream))))

def derive_seed(seed: int, *stream: int) -> int:
    words = np.random.SeedSequence(int(seed), spawn_key=tuple(stream)).generate_state(2, np.uint64)
    return int(words[0]) & _MASK64

def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy) & _MASK64
