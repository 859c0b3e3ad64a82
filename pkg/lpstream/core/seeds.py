"""
LPStream: Seed Derivation

Every sketch bank and every random draw gets its own seed, derived from the
master seed and a counter key (purpose, iteration, class or machine). Runs are
reproducible and machines holding the same key build mergeable sketches.
"""

from enum import IntEnum

import numpy as np


class SeedPurpose(IntEnum):
    SAMPLE_BANK = 1
    CHECK_BANK = 2
    DRAW = 3
    QUOTA = 4
    CENTER = 5
    RADIUS = 6


def derive_seed(master: int, *key: int) -> int:
    """64-bit seed for `key` under `master`."""
    state = np.random.SeedSequence([int(master), *(int(k) for k in key)]).generate_state(2, dtype=np.uint32)
    return (int(state[0]) << 32) | int(state[1])


def derive_rng(master: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master), *(int(k) for k in key)]))
