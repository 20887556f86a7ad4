"""First-order Reed-Muller component codes, constant-weight part.

RM(1, v) has 2**(v+1) words: the span of the all-ones row and the v
coordinate functions over F2^v. Dropping the all-zeros and all-ones words
leaves f = 2**(v+1) - 2 words of weight exactly 2**(v-1). With one
coordinate punctured the minimum distance is 2**(v-1) - 1, so the
correction radius is t = 2**(v-2) - 1 (3 for v=4, 7 for v=5).
"""

import numpy as np

from ..errors import ParamError
from .codebook import Codebook

MIN_V = 3
MAX_V = 6


def generator_matrix(v: int) -> np.ndarray:
    """(v+1) x 2**v generator: all-ones row, then x_i = bit i of the point index."""
    n = 1 << v
    points = np.arange(n)
    rows = [np.ones(n, dtype=np.uint8)]
    rows += [((points >> i) & 1).astype(np.uint8) for i in range(v)]
    return np.vstack(rows)


def correction_radius(v: int) -> int:
    return (1 << (v - 2)) - 1


def build_codebook(v: int) -> Codebook:
    if not MIN_V <= v <= MAX_V:
        raise ParamError(f"Reed-Muller parameter v={v} outside [{MIN_V}, {MAX_V}]")
    n = 1 << v
    gen = generator_matrix(v)
    coeffs = (np.arange(1 << (v + 1))[:, None] >> np.arange(v + 1)) & 1
    words = (coeffs @ gen) & 1
    weights = words.sum(axis=1)
    keep = (weights != 0) & (weights != n)
    return Codebook(
        family="reed_muller",
        v=v,
        n=n,
        f=int(keep.sum()),
        t=correction_radius(v),
        words=words[keep].astype(np.uint8),
    )
