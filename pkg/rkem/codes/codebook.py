"""Codebooks, public labelings and minimum-distance decoding.

A codebook is a small table of equal-length binary words; decoding is a
brute-force distance scan over the table, restricted to the coordinates
that survived puncturing. Ties and distances beyond the correction radius
are reported as failures rather than resolved arbitrarily.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from ..errors import DecodeFailure, FormatError


@dataclass(frozen=True, eq=False)
class Codebook:
    """Table of ``f`` codewords of length ``n`` correcting up to ``t`` errors."""

    family: str
    v: int
    n: int
    f: int
    t: int
    words: np.ndarray

    def __post_init__(self):
        words = np.array(self.words, dtype=np.uint8, copy=True)
        words.setflags(write=False)
        object.__setattr__(self, "words", words)
        if words.shape != (self.f, self.n):
            raise ValueError(f"codebook words have shape {words.shape}, expected ({self.f}, {self.n})")

    def pairwise_distances(self, coords: Optional[Iterable[int]] = None) -> np.ndarray:
        """f x f Hamming distance table, optionally restricted to ``coords``."""
        w = self.words if coords is None else self.words[:, list(coords)]
        return (w[:, None, :] != w[None, :, :]).sum(axis=-1)


@dataclass(frozen=True)
class Labeling:
    """Public bijection between key symbols and codeword indices."""

    forward: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_forward(cls, forward) -> "Labeling":
        fwd = np.asarray(forward, dtype=np.int64)
        if fwd.ndim != 1 or sorted(fwd.tolist()) != list(range(fwd.size)):
            raise ValueError("labeling must be a permutation of 0..f-1")
        inv = np.empty_like(fwd)
        inv[fwd] = np.arange(fwd.size)
        fwd.setflags(write=False)
        inv.setflags(write=False)
        return cls(forward=fwd, inverse=inv)

    @property
    def f(self) -> int:
        return int(self.forward.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Labeling):
            return NotImplemented
        return np.array_equal(self.forward, other.forward)

    def __hash__(self) -> int:
        return hash(self.forward.tobytes())

    def to_bytes(self) -> bytes:
        return self.forward.astype("<u2").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Labeling":
        if len(data) % 2:
            raise FormatError("labeling section has odd length")
        try:
            return cls.from_forward(np.frombuffer(data, dtype="<u2").astype(np.int64))
        except ValueError as exc:
            raise FormatError(str(exc)) from exc


def random_labeling(f: int, rng: np.random.Generator) -> Labeling:
    if f < 2:
        raise ValueError(f"labeling needs at least 2 symbols, got {f}")
    return Labeling.from_forward(rng.permutation(f))


def _distances(received: np.ndarray, mask: np.ndarray, codebook: Codebook) -> np.ndarray:
    diff = received[:, None, :] ^ codebook.words[None, :, :]
    return (diff & mask[:, None, :]).sum(axis=-1, dtype=np.int64)


def decode_many(received, surviving, codebook: Codebook) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised decode of k received words.

    ``received`` is (k, n) bits; ``surviving`` is a (k, n) boolean mask of the
    coordinates each word is defined on. Returns (indices, distances) where a
    failed word carries index -1.
    """
    received = np.asarray(received, dtype=np.uint8) & 1
    mask = np.asarray(surviving, dtype=np.uint8) & 1
    if received.ndim != 2 or received.shape[1] != codebook.n or mask.shape != received.shape:
        raise ValueError(f"expected (k, {codebook.n}) words and masks, got {received.shape} / {mask.shape}")
    dist = _distances(received, mask, codebook)
    best = dist.argmin(axis=1)
    best_dist = dist[np.arange(dist.shape[0]), best]
    ties = (dist == best_dist[:, None]).sum(axis=1) > 1
    failed = ties | (best_dist > codebook.t)
    return np.where(failed, -1, best), best_dist


def decode(word_bits, surviving_coords: Iterable[int], codebook: Codebook) -> Tuple[int, int]:
    """Nearest codeword on ``surviving_coords``; raises DecodeFailure on a tie or > t."""
    coords = sorted(set(int(c) for c in surviving_coords))
    if any(c < 0 or c >= codebook.n for c in coords):
        raise ValueError(f"surviving coordinates must lie in [0, {codebook.n})")
    if len(coords) < codebook.n - 1:
        raise ValueError("at most one coordinate may be punctured")
    word = np.zeros((1, codebook.n), dtype=np.uint8)
    word[0, coords] = np.asarray(word_bits, dtype=np.uint8)[coords] & 1
    mask = np.zeros((1, codebook.n), dtype=bool)
    mask[0, coords] = True
    index, dist = decode_many(word, mask, codebook)
    if index[0] < 0:
        raise DecodeFailure(f"no unique codeword within distance {codebook.t} (best {int(dist[0])})")
    return int(index[0]), int(dist[0])
