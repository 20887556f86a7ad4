"""Dense bit-packed linear algebra over GF(2).

Matrices are stored row-major, each row packed least-significant-bit first
into whole bytes; padding bits past ``cols`` are always zero, so two equal
matrices have equal payload bytes. Products go through a float BLAS matmul
and are reduced mod 2 (exact while inner dimensions stay below 2**53).
Elimination works on the packed rows directly.
"""

import struct
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionError, FormatError, ResampleExhausted, Singular

MATRIX_MAGIC = b"RKB1"
_MATRIX_HEADER = struct.Struct("<4sII")


def _row_bytes(cols: int) -> int:
    return (cols + 7) // 8


def _pack(bits: np.ndarray) -> np.ndarray:
    return np.packbits(np.asarray(bits, dtype=np.uint8) & 1, axis=-1, bitorder="little")


def _unpack(payload: np.ndarray, count: int) -> np.ndarray:
    return np.unpackbits(payload, axis=-1, count=count, bitorder="little")


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class BitMatrix:
    """Immutable dense matrix over GF(2)."""

    def __init__(self, rows: int, cols: int, payload: np.ndarray):
        if rows < 1 or cols < 1:
            raise DimensionError(f"matrix must be at least 1x1, got {rows}x{cols}")
        payload = np.array(payload, dtype=np.uint8, copy=True)
        if payload.shape != (rows, _row_bytes(cols)):
            raise DimensionError(
                f"payload shape {payload.shape} does not fit a {rows}x{cols} matrix"
            )
        tail = cols % 8
        if tail:
            payload[:, -1] &= (1 << tail) - 1
        self.rows = rows
        self.cols = cols
        self.payload = _readonly(payload)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_dense(cls, bits) -> "BitMatrix":
        arr = np.asarray(bits)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {arr.shape}")
        arr = arr.astype(np.uint8) & 1
        return cls(arr.shape[0], arr.shape[1], _pack(arr))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _row_bytes(cols)), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "BitMatrix":
        """Permutation matrix whose row ``i`` has its single 1 in column ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        n = perm.size
        if n < 1 or sorted(perm.tolist()) != list(range(n)):
            raise DimensionError("not a permutation of 0..n-1")
        dense = np.zeros((n, n), dtype=np.uint8)
        dense[np.arange(n), perm] = 1
        return cls.from_dense(dense)

    # -- views ------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @cached_property
    def dense(self) -> np.ndarray:
        """Unpacked read-only 0/1 array of shape (rows, cols)."""
        return _readonly(_unpack(self.payload, self.cols))

    @cached_property
    def _real(self) -> np.ndarray:
        return _readonly(self.dense.astype(np.float64))

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols}")
        return int((self.payload[i, j >> 3] >> (j & 7)) & 1)

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "BitMatrix":
        return BitMatrix.from_dense(self.dense[r0:r1, c0:c1])

    def row_sums(self) -> np.ndarray:
        return self.dense.sum(axis=1, dtype=np.int64)

    def col_sums(self) -> np.ndarray:
        return self.dense.sum(axis=0, dtype=np.int64)

    def weight(self) -> int:
        return int(self.dense.sum(dtype=np.int64))

    def is_zero(self) -> bool:
        return not self.payload.any()

    def is_permutation(self) -> bool:
        return (
            self.rows == self.cols
            and bool(np.all(self.row_sums() == 1))
            and bool(np.all(self.col_sums() == 1))
        )

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        return BitMatrix(self.rows, self.cols, self.payload ^ other.payload)

    __add__ = __xor__

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.payload, other.payload)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.payload.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, weight={self.weight()})"

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        return _MATRIX_HEADER.pack(MATRIX_MAGIC, self.rows, self.cols) + self.payload.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitMatrix":
        if len(data) < _MATRIX_HEADER.size:
            raise FormatError("truncated matrix header")
        magic, rows, cols = _MATRIX_HEADER.unpack_from(data)
        if magic != MATRIX_MAGIC:
            raise FormatError(f"bad matrix magic {magic!r}")
        body = data[_MATRIX_HEADER.size:]
        if rows < 1 or cols < 1 or len(body) != rows * _row_bytes(cols):
            raise FormatError(f"matrix body of {len(body)} bytes does not fit {rows}x{cols}")
        payload = np.frombuffer(body, dtype=np.uint8).reshape(rows, _row_bytes(cols))
        tail = cols % 8
        if tail and np.any(payload[:, -1] >> tail):
            raise FormatError("non-zero padding bits in matrix payload")
        return cls(rows, cols, payload)


class BitVector:
    """Immutable packed vector over GF(2)."""

    def __init__(self, length: int, payload: np.ndarray):
        if length < 0:
            raise DimensionError("vector length must be non-negative")
        payload = np.array(payload, dtype=np.uint8, copy=True).reshape(-1)
        if payload.size != _row_bytes(length):
            raise DimensionError(f"payload of {payload.size} bytes does not fit {length} bits")
        tail = length % 8
        if tail:
            payload[-1] &= (1 << tail) - 1
        self.len = length
        self.payload = _readonly(payload)

    @classmethod
    def from_bits(cls, bits) -> "BitVector":
        arr = np.asarray(bits, dtype=np.uint8).reshape(-1) & 1
        return cls(arr.size, _pack(arr))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, np.zeros(_row_bytes(length), dtype=np.uint8))

    @cached_property
    def bits(self) -> np.ndarray:
        return _readonly(_unpack(self.payload, self.len))

    def __len__(self) -> int:
        return self.len

    def weight(self) -> int:
        return int(self.bits.sum(dtype=np.int64))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.len != other.len:
            raise DimensionError(f"cannot add vectors of length {self.len} and {other.len}")
        return BitVector(self.len, self.payload ^ other.payload)

    __add__ = __xor__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.len == other.len and np.array_equal(self.payload, other.payload)

    def __hash__(self) -> int:
        return hash((self.len, self.payload.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector(len={self.len}, weight={self.weight()})"

    def to_bytes(self) -> bytes:
        return self.payload.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, length: int) -> "BitVector":
        if len(data) != _row_bytes(length):
            raise FormatError(f"{len(data)} bytes cannot hold exactly {length} bits")
        payload = np.frombuffer(data, dtype=np.uint8)
        tail = length % 8
        if tail and payload[-1] >> tail:
            raise FormatError("non-zero padding bits in vector payload")
        return cls(length, payload)


# -- products -------------------------------------------------------------


def mul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2).

    The product runs as a float64 BLAS matmul and is reduced mod 2; entries
    stay exact while the inner dimension is below 2**53.

    Args:
        a: Left factor, rows x k.
        b: Right factor, k x cols.

    Returns:
        The rows x cols product.

    Raises:
        DimensionError: Inner dimensions differ.
    """
    if a.cols != b.rows:
        raise DimensionError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    prod = a._real @ b._real
    return BitMatrix.from_dense(prod.astype(np.int64) & 1)


def mat_vec(a: BitMatrix, x: BitVector) -> BitVector:
    """``a @ x`` over GF(2); raises DimensionError on a length mismatch."""
    if a.cols != x.len:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by vector of length {x.len}")
    prod = a._real @ x.bits.astype(np.float64)
    return BitVector.from_bits(prod.astype(np.int64) & 1)


# -- elimination ----------------------------------------------------------


def _eliminate(work: np.ndarray, ncols: int, require_full: bool) -> int:
    """Gauss-Jordan on packed rows, in place. Returns the rank.

    Pivots are the first row (at or below the pivot row) with the column bit
    set. With ``require_full`` a pivot-less column raises Singular at once.
    """
    nrows = work.shape[0]
    pivot = 0
    for col in range(ncols):
        if pivot == nrows:
            break
        byte, shift = divmod(col, 8)
        below = np.flatnonzero((work[pivot:, byte] >> shift) & 1)
        if below.size == 0:
            if require_full:
                raise Singular(f"no pivot in column {col}; rank < {ncols}")
            continue
        found = pivot + int(below[0])
        if found != pivot:
            work[[pivot, found]] = work[[found, pivot]]
        hits = np.flatnonzero((work[:, byte] >> shift) & 1)
        hits = hits[hits != pivot]
        if hits.size:
            work[hits] ^= work[pivot]
        pivot += 1
    return pivot


def invert(a: BitMatrix) -> BitMatrix:
    """Inverse over GF(2); raises Singular when rank < n."""
    if a.rows != a.cols:
        raise DimensionError(f"cannot invert non-square {a.rows}x{a.cols} matrix")
    n = a.rows
    work = _pack(np.hstack([a.dense, np.eye(n, dtype=np.uint8)]))
    _eliminate(work, n, require_full=True)
    return BitMatrix.from_dense(_unpack(work, 2 * n)[:, n:])


def rank(a: BitMatrix) -> int:
    """Rank over GF(2).

    Args:
        a: Any matrix; it is not modified.

    Returns:
        Number of pivots found by elimination on a packed copy of the rows.
    """
    work = np.array(a.payload, copy=True)
    return _eliminate(work, a.cols, require_full=False)


# -- sampling and assembly ------------------------------------------------


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_dense(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def random_permutation(n: int, rng: np.random.Generator) -> BitMatrix:
    return BitMatrix.from_permutation(rng.permutation(n))


def random_invertible(n: int, rng: np.random.Generator, max_tries: int = 64) -> Tuple[BitMatrix, BitMatrix]:
    """Uniform invertible n x n matrix together with its inverse."""
    for _ in range(max_tries):
        candidate = random_matrix(n, n, rng)
        try:
            return candidate, invert(candidate)
        except Singular:
            continue
    raise ResampleExhausted(f"no invertible {n}x{n} matrix after {max_tries} draws")


def block_matrix(grid: Sequence[Sequence[BitMatrix]]) -> BitMatrix:
    return BitMatrix.from_dense(np.block([[blk.dense for blk in row] for row in grid]))


def block_diag(*blocks: BitMatrix) -> BitMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    dense = np.zeros((rows, cols), dtype=np.uint8)
    r = c = 0
    for blk in blocks:
        dense[r:r + blk.rows, c:c + blk.cols] = blk.dense
        r += blk.rows
        c += blk.cols
    return BitMatrix.from_dense(dense)


def vstack(*blocks: BitMatrix) -> BitMatrix:
    return BitMatrix.from_dense(np.vstack([b.dense for b in blocks]))
