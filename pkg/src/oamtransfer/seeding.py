"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, *key)``, so a block of
shots draws the same numbers whichever worker or order runs it.
"""

from __future__ import annotations

import os

import numpy as np

SEED_ENV = "OAMTRANSFER_SEED"
FALLBACK_SEED = 20210815
BLOCK_SHOTS = 1 << 14


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else FALLBACK_SEED


def stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def blocks(shots: int, block: int = BLOCK_SHOTS):
    """Yield ``(block_index, size)`` covering ``shots``."""
    start, idx = 0, 0
    while start < shots:
        size = min(block, shots - start)
        yield idx, size
        start += size
        idx += 1
