"""Key generation: P = B C with a private A such that A B = blockdiag(Z, D).

C stacks C1 (m x s, one punctured input coordinate per block, the rest
permuted within the block) over a random p x s matrix C2. B and A are built
block by block:

    B1 = Z + A2 B3        B2 = A2 B4
    A3 B1 = A4 B3         D  = A3 B2 + A4 B4

with Z a block-diagonal permutation, A2, B3, B4, A4 random and A3 solved
through B1^-1. Alice keeps A2 and the composite map Z C1; the top m rows of
A are [I | A2], which is all decryption needs.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from loguru import logger

from .codes import Labeling, random_labeling
from .errors import ParamError, ResampleExhausted, Singular
from .gf2 import (
    BitMatrix,
    block_diag,
    block_matrix,
    invert,
    mul,
    random_invertible,
    random_matrix,
    rank,
    vstack,
)
from .params import ParamSet

DEFAULT_RESAMPLE_LIMIT = 64


@dataclass(frozen=True)
class CommonRandomnessConfig:
    """How many public common-randomness positions to place in the key."""

    r1_size: int = 0
    r2_size: int = 0
    full_mask: bool = False

    def resolve(self, params: ParamSet) -> Tuple[int, int]:
        r1 = params.s if self.full_mask else self.r1_size
        if not 0 <= r1 <= params.s:
            raise ParamError(f"|R1|={r1} outside [0, {params.s}]")
        if not 0 <= self.r2_size <= params.m:
            raise ParamError(f"|R2|={self.r2_size} outside [0, {params.m}]")
        return r1, self.r2_size


def _positions(values, bound: int, name: str) -> np.ndarray:
    arr = np.unique(np.asarray(values, dtype=np.int64))
    if arr.size != len(values) or (arr.size and (arr[0] < 0 or arr[-1] >= bound)):
        raise ValueError(f"{name} must be distinct positions in [0, {bound})")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PublicKey:
    params: ParamSet
    P: BitMatrix
    labelings: Tuple[Labeling, ...]
    R1: np.ndarray
    R2: np.ndarray

    def __post_init__(self):
        prm = self.params
        if self.P.shape != (prm.m + prm.p, prm.s):
            raise ValueError(f"P is {self.P.rows}x{self.P.cols}, expected {prm.m + prm.p}x{prm.s}")
        if len(self.labelings) != prm.r or any(lab.f != prm.f for lab in self.labelings):
            raise ValueError(f"expected {prm.r} labelings over {prm.f} symbols")
        object.__setattr__(self, "R1", _positions(self.R1, prm.s, "R1"))
        object.__setattr__(self, "R2", _positions(self.R2, prm.m, "R2"))


@dataclass(frozen=True, eq=False)
class PrivateKey:
    """A2, the block map sigma = Z C1 (output coord -> input coord) and punctures."""

    params: ParamSet
    A2: BitMatrix
    sigma: np.ndarray
    punctured: np.ndarray
    labelings: Tuple[Labeling, ...]
    R1: np.ndarray
    R2: np.ndarray

    def __post_init__(self):
        prm = self.params
        if self.A2.shape != (prm.m, prm.p):
            raise ValueError(f"A2 is {self.A2.rows}x{self.A2.cols}, expected {prm.m}x{prm.p}")
        sigma = np.asarray(self.sigma, dtype=np.int64)
        punctured = np.asarray(self.punctured, dtype=np.int64)
        if sigma.shape != (prm.m,) or punctured.shape != (prm.r,):
            raise ValueError("sigma / punctured have the wrong length")
        # each block's images plus its punctured coordinate tile the block's inputs
        slots = np.concatenate([sigma.reshape(prm.r, prm.n), punctured[:, None]], axis=1)
        expected = np.arange(prm.s).reshape(prm.r, prm.ell)
        if not np.array_equal(np.sort(slots, axis=1), expected):
            raise ValueError("sigma is not block-preserving")
        if len(self.labelings) != prm.r:
            raise ValueError(f"expected {prm.r} labelings")
        sigma.setflags(write=False)
        punctured.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "punctured", punctured)
        object.__setattr__(self, "R1", _positions(self.R1, prm.s, "R1"))
        object.__setattr__(self, "R2", _positions(self.R2, prm.m, "R2"))


@dataclass(frozen=True, eq=False)
class ABFactors:
    A2: BitMatrix
    A3: BitMatrix
    A4: BitMatrix
    B1: BitMatrix
    B2: BitMatrix
    B3: BitMatrix
    B4: BitMatrix
    Z: BitMatrix
    z_perm: np.ndarray
    D: BitMatrix

    @property
    def A(self) -> BitMatrix:
        return block_matrix([[BitMatrix.identity(self.A2.rows), self.A2], [self.A3, self.A4]])

    @property
    def B(self) -> BitMatrix:
        return block_matrix([[self.B1, self.B2], [self.B3, self.B4]])

    def expected_product(self) -> BitMatrix:
        return block_diag(self.Z, self.D)


@dataclass(frozen=True, eq=False)
class KeygenTrace:
    """Intermediate matrices of one key generation; never serialized."""

    factors: ABFactors
    C1: BitMatrix
    C2: BitMatrix
    sigma_c1: np.ndarray

    @property
    def C(self) -> BitMatrix:
        return vstack(self.C1, self.C2)

    def c2_rank(self) -> int:
        return rank(self.C2)


def build_c1(params: ParamSet, rng: np.random.Generator) -> Tuple[BitMatrix, np.ndarray, np.ndarray]:
    """Block-diagonal punctured selection matrix.

    Returns (C1, sigma_c1, punctured): row i of C1 has its single 1 in column
    sigma_c1[i]; punctured[j] is the all-zero input column of block j.
    """
    n, ell = params.n, params.ell
    sigma_c1 = np.empty(params.m, dtype=np.int64)
    punctured = np.empty(params.r, dtype=np.int64)
    for j in range(params.r):
        cut = int(rng.integers(ell))
        survivors = np.delete(params.block_inputs(j), cut)
        sigma_c1[j * n:(j + 1) * n] = survivors[rng.permutation(n)]
        punctured[j] = j * ell + cut
    dense = np.zeros((params.m, params.s), dtype=np.uint8)
    dense[np.arange(params.m), sigma_c1] = 1
    return BitMatrix.from_dense(dense), sigma_c1, punctured


def _block_permutation(params: ParamSet, rng: np.random.Generator) -> np.ndarray:
    n = params.n
    return np.concatenate([j * n + rng.permutation(n) for j in range(params.r)])


def build_ab(params: ParamSet, rng: np.random.Generator, max_retries: int = DEFAULT_RESAMPLE_LIMIT) -> ABFactors:
    """Sample B and the private rows of A with A B block-diagonal [[Z, 0], [0, D]]."""
    m, p = params.m, params.p
    identity_p = BitMatrix.identity(p)
    for attempt in range(1, max_retries + 1):
        z_perm = _block_permutation(params, rng)
        Z = BitMatrix.from_permutation(z_perm)
        A2 = random_matrix(m, p, rng)
        B3 = random_matrix(p, m, rng)
        # det(Z + A2 B3) = det(I + B3 Z^T A2): screen on the p x p matrix first
        zt_a2 = BitMatrix.from_dense(A2.dense[np.argsort(z_perm)])
        if rank(identity_p ^ mul(B3, zt_a2)) < p:
            logger.debug(f"B1 singular on attempt {attempt}, resampling")
            continue
        B1 = Z ^ mul(A2, B3)
        try:
            B1_inv = invert(B1)
        except Singular:
            continue
        break
    else:
        raise ResampleExhausted(f"B1 stayed singular for {max_retries} attempts")

    B4 = random_matrix(p, p, rng)
    B2 = mul(A2, B4)
    A4, _ = random_invertible(p, rng, max_retries)
    A3 = mul(mul(A4, B3), B1_inv)
    D = mul(A3, B2) ^ mul(A4, B4)
    z_perm.setflags(write=False)
    return ABFactors(A2=A2, A3=A3, A4=A4, B1=B1, B2=B2, B3=B3, B4=B4, Z=Z, z_perm=z_perm, D=D)


def _sample_positions(bound: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if size == 0:
        return np.empty(0, dtype=np.int64)
    return np.sort(rng.choice(bound, size=size, replace=False)).astype(np.int64)


def keygen(
    params: ParamSet,
    rng: np.random.Generator,
    cr_config: Optional[CommonRandomnessConfig] = None,
    max_retries: int = DEFAULT_RESAMPLE_LIMIT,
    with_trace: bool = False,
) -> Tuple[PublicKey, PrivateKey, Optional[KeygenTrace]]:
    """Generate a key pair with public matrix P = B [C1; C2].

    Args:
        params: Scheme parameters.
        rng: Generator for the KEYGEN stream; the whole key follows from it.
        cr_config: Sizes of the public common-randomness sets R1 and R2.
        max_retries: Attempts allowed for an invertible B1 and A4.
        with_trace: Also return the intermediate factors, for tests and audits.

    Returns:
        (public key, private key, trace). The trace is None unless requested.

    Raises:
        ParamError: |R1| or |R2| out of range.
        ResampleExhausted: No invertible B1 within ``max_retries``.
    """
    r1_size, r2_size = (cr_config or CommonRandomnessConfig()).resolve(params)

    C1, sigma_c1, punctured = build_c1(params, rng)
    factors = build_ab(params, rng, max_retries)
    C2 = random_matrix(params.p, params.s, rng)
    P = mul(factors.B, vstack(C1, C2))

    # (Z C1)[i] = C1[z_perm[i]]
    sigma = sigma_c1[factors.z_perm]
    labelings = tuple(random_labeling(params.f, rng) for _ in range(params.r))
    R1 = _sample_positions(params.s, r1_size, rng)
    R2 = _sample_positions(params.m, r2_size, rng)

    pk = PublicKey(params=params, P=P, labelings=labelings, R1=R1, R2=R2)
    sk = PrivateKey(
        params=params,
        A2=factors.A2,
        sigma=sigma,
        punctured=punctured,
        labelings=labelings,
        R1=R1,
        R2=R2,
    )
    logger.info(
        f"generated {P.rows}x{P.cols} public key (sec={params.sec}, v={params.v}, |R1|={r1_size}, |R2|={r2_size})"
    )
    trace = KeygenTrace(factors=factors, C1=C1, C2=C2, sigma_c1=sigma_c1) if with_trace else None
    return pk, sk, trace
