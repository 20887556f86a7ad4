"""Seeded randomness streams.

Every random draw in the library comes from a numpy ``Generator`` handed in
by the caller. The CLI and the simulators derive those generators from one
master seed, one stream per concern, so any output can be replayed:

    KEYGEN         key generation
    ENCAP          key value, pad bits, error positions
    CR             common-randomness bits used by the CLI demo paths
    RTT            round-trip-time simulator
    CONSOLIDATION  per-trial streams, index = (sweep point, trial)
    ATTACK         toy attack instance generation
"""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    KEYGEN = 1
    ENCAP = 2
    CR = 3
    RTT = 4
    CONSOLIDATION = 5
    ATTACK = 6


def make_rng(seed: int, stream: Stream, *index: int) -> np.random.Generator:
    """Generator for ``stream`` (and optional sub-index) under master ``seed``."""
    key = (int(stream),) + tuple(int(i) for i in index)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def fresh_seed() -> int:
    """Master seed from OS entropy, for runs where the user gave none."""
    return int(np.random.SeedSequence().entropy)
