"""Encapsulation and decapsulation.

Bob sends m_k = P (c + e1 + r1) + e2 + r2. c holds one labeled codeword plus
a random pad bit per block, e1/e2 are his injected errors (w1_j + w2_j = w
per block) and r1/r2 his copy of the common-randomness bits at the public
positions R1/R2. e2 and r2 only touch the first m coordinates, so Alice's
[I | A2] top rows pass them through unchanged and every error stays in its
own block after the private map.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from .codes import decode_many
from .errors import BudgetError, DecapFailure, DimensionError
from .gf2 import BitVector, mat_vec
from .keygen import PrivateKey, PublicKey
from .params import ParamSet


# -- key <-> symbols ------------------------------------------------------


def key_to_symbols(value: int, params: ParamSet) -> Tuple[int, ...]:
    """Little-endian radix-f digits of ``value`` (r digits)."""
    if not 0 <= value < (1 << params.sec):
        raise ValueError(f"key value outside [0, 2^{params.sec})")
    digits = []
    for _ in range(params.r):
        value, digit = divmod(value, params.f)
        digits.append(digit)
    return tuple(digits)


def symbols_to_key(symbols: Sequence[int], params: ParamSet) -> int:
    if len(symbols) != params.r:
        raise ValueError(f"expected {params.r} symbols, got {len(symbols)}")
    value = 0
    for digit in reversed([int(s) for s in symbols]):
        if not 0 <= digit < params.f:
            raise ValueError(f"symbol {digit} outside [0, {params.f})")
        value = value * params.f + digit
    if value >= (1 << params.sec):
        raise ValueError(f"symbols encode a value >= 2^{params.sec}")
    return value


@dataclass(frozen=True)
class SharedKey:
    value: int
    symbols: Tuple[int, ...]
    sec: int

    @classmethod
    def from_value(cls, params: ParamSet, value: int) -> "SharedKey":
        return cls(value=value, symbols=key_to_symbols(value, params), sec=params.sec)

    @classmethod
    def from_symbols(cls, params: ParamSet, symbols: Sequence[int]) -> "SharedKey":
        return cls(value=symbols_to_key(symbols, params), symbols=tuple(int(s) for s in symbols), sec=params.sec)

    @classmethod
    def random(cls, params: ParamSet, rng: np.random.Generator) -> "SharedKey":
        raw = int.from_bytes(rng.bytes((params.sec + 7) // 8), "little")
        return cls.from_value(params, raw & ((1 << params.sec) - 1))

    @classmethod
    def from_hex(cls, params: ParamSet, text: str) -> "SharedKey":
        return cls.from_value(params, int(text.strip(), 16))

    def hex(self) -> str:
        return format(self.value, f"0{(self.sec + 3) // 4}x")


# -- message pieces -------------------------------------------------------


@dataclass(frozen=True)
class Ciphertext:
    m_k: BitVector


@dataclass(frozen=True, eq=False)
class CommonRandomnessView:
    """One party's copy of the common-randomness bits at R1 and R2."""

    bits_r1: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))
    bits_r2: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))

    def __post_init__(self):
        for name in ("bits_r1", "bits_r2"):
            arr = np.asarray(getattr(self, name), dtype=np.uint8).reshape(-1) & 1
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def empty(cls) -> "CommonRandomnessView":
        return cls()

    def check(self, R1: np.ndarray, R2: np.ndarray) -> None:
        if self.bits_r1.size != R1.size or self.bits_r2.size != R2.size:
            raise DimensionError(
                f"common randomness has {self.bits_r1.size}/{self.bits_r2.size} bits, "
                f"key expects |R1|={R1.size}, |R2|={R2.size}"
            )


@dataclass(frozen=True, eq=False)
class ErrorBudget:
    """Per-block split of the injected error weight between e1 and e2."""

    w_total: int
    w1: np.ndarray

    @property
    def w2(self) -> np.ndarray:
        return self.w_total - self.w1

    @classmethod
    def sample(cls, params: ParamSet, w_total: int, rng: np.random.Generator) -> "ErrorBudget":
        _check_total(params, w_total)
        return cls(w_total=w_total, w1=rng.integers(0, w_total + 1, size=params.r))

    def validate(self, params: ParamSet) -> None:
        _check_total(params, self.w_total)
        w1 = np.asarray(self.w1)
        if w1.shape != (params.r,) or np.any(w1 < 0) or np.any(w1 > self.w_total):
            raise BudgetError(f"w1 must hold {params.r} values in [0, {self.w_total}]")


def _check_total(params: ParamSet, w_total: int) -> None:
    if not 0 <= w_total <= params.t:
        raise BudgetError(f"error budget {w_total} outside [0, t={params.t}]")


@dataclass(frozen=True, eq=False)
class EncapsulationTrace:
    symbols: np.ndarray
    c: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


def default_budget(pk: PublicKey) -> int:
    """Full radius without common randomness; zero when R1 masks every coordinate."""
    return 0 if pk.R1.size == pk.params.s else pk.params.t


# -- encapsulation --------------------------------------------------------


def encapsulate_symbols(
    pk: PublicKey,
    symbols: Sequence[int],
    rng: np.random.Generator,
    cr: Optional[CommonRandomnessView] = None,
    budget: Union[int, ErrorBudget] = 0,
) -> Tuple[Ciphertext, EncapsulationTrace]:
    """Encapsulate a key given as r radix-f symbols.

    Computes m_k = P (c + e1 + r1) + e2 + r2, where c holds the labeled codewords
    with a random pad bit per block.

    Args:
        pk: Recipient public key.
        symbols: r values in [0, f).
        rng: Generator for pads, the error split and error positions.
        cr: Bob's common-randomness bits at R1 and R2; required when the key has them.
        budget: Injected error weight per block (split at random between e1 and e2),
            or an explicit ErrorBudget.

    Returns:
        (ciphertext, trace of every intermediate vector).

    Raises:
        BudgetError: Weight outside [0, t] or a malformed split.
        DimensionError: Common-randomness sizes do not match the key.
    """
    prm = pk.params
    book = prm.codebook

    symbols = np.asarray(symbols, dtype=np.int64)
    if symbols.shape != (prm.r,) or np.any(symbols < 0) or np.any(symbols >= prm.f):
        raise ValueError(f"expected {prm.r} symbols in [0, {prm.f})")
    cr = cr or CommonRandomnessView.empty()
    cr.check(pk.R1, pk.R2)
    if isinstance(budget, ErrorBudget):
        budget.validate(prm)
    else:
        budget = ErrorBudget.sample(prm, int(budget), rng)

    pads = rng.integers(0, 2, size=prm.r, dtype=np.uint8)
    codeword_idx = np.array([lab.forward[sym] for lab, sym in zip(pk.labelings, symbols)])
    c = np.zeros((prm.r, prm.ell), dtype=np.uint8)
    c[:, :prm.n] = book.words[codeword_idx]
    c[:, prm.n] = pads
    c = c.reshape(-1)

    e1 = np.zeros(prm.s, dtype=np.uint8)
    e2 = np.zeros(prm.m + prm.p, dtype=np.uint8)
    for j in range(prm.r):
        e1[j * prm.ell + rng.choice(prm.ell, int(budget.w1[j]), replace=False)] = 1
    for j in range(prm.r):
        e2[j * prm.n + rng.choice(prm.n, int(budget.w2[j]), replace=False)] = 1

    r1 = np.zeros(prm.s, dtype=np.uint8)
    r1[pk.R1] = cr.bits_r1
    r2 = np.zeros(prm.m + prm.p, dtype=np.uint8)
    r2[pk.R2] = cr.bits_r2

    hidden = BitVector.from_bits(c ^ e1 ^ r1)
    m_k = mat_vec(pk.P, hidden).bits ^ e2 ^ r2
    trace = EncapsulationTrace(
        symbols=symbols, c=c, e1=e1, e2=e2, r1=r1, r2=r2,
        w1=np.asarray(budget.w1), w2=np.asarray(budget.w2),
    )
    return Ciphertext(m_k=BitVector.from_bits(m_k)), trace


def encapsulate(
    pk: PublicKey,
    key: SharedKey,
    rng: np.random.Generator,
    cr: Optional[CommonRandomnessView] = None,
    budget: Union[int, ErrorBudget] = 0,
) -> Tuple[Ciphertext, EncapsulationTrace]:
    """Encapsulate ``key``; see encapsulate_symbols."""
    return encapsulate_symbols(pk, key.symbols, rng, cr, budget)



# -- decapsulation --------------------------------------------------------


def unmask(sk: PrivateKey, ct: Ciphertext, cr_alice: Optional[CommonRandomnessView] = None) -> np.ndarray:
    """Top m bits of A m_k with Alice's estimate of Z C1 r1 + r2 removed."""
    prm = sk.params
    if ct.m_k.len != prm.m + prm.p:
        raise DimensionError(f"ciphertext has {ct.m_k.len} bits, expected {prm.m + prm.p}")
    cr = cr_alice or CommonRandomnessView.empty()
    cr.check(sk.R1, sk.R2)

    y = ct.m_k.bits
    u = y[:prm.m] ^ mat_vec(sk.A2, BitVector.from_bits(y[prm.m:])).bits
    if sk.R1.size:
        r1_hat = np.zeros(prm.s, dtype=np.uint8)
        r1_hat[sk.R1] = cr.bits_r1
        u = u ^ r1_hat[sk.sigma]
    if sk.R2.size:
        u = u.copy()
        u[sk.R2] ^= cr.bits_r2
    return u


def recover_symbols(
    sk: PrivateKey, ct: Ciphertext, cr_alice: Optional[CommonRandomnessView] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """Decode every block. Returns (symbols, failed); failed blocks carry symbol -1."""
    prm = sk.params
    u = unmask(sk, ct, cr_alice)

    word = np.zeros(prm.s, dtype=np.uint8)
    word[sk.sigma] = u
    received = word.reshape(prm.r, prm.ell)[:, :prm.n]

    surviving = np.ones((prm.r, prm.n), dtype=bool)
    local = sk.punctured - np.arange(prm.r) * prm.ell
    in_code = local < prm.n
    surviving[np.flatnonzero(in_code), local[in_code]] = False

    indices, _ = decode_many(received, surviving, prm.codebook)
    failed = indices < 0
    symbols = np.array(
        [-1 if idx < 0 else int(lab.inverse[idx]) for lab, idx in zip(sk.labelings, indices)],
        dtype=np.int64,
    )
    return symbols, failed


def decapsulate(
    sk: PrivateKey, ct: Ciphertext, cr_alice: Optional[CommonRandomnessView] = None
) -> SharedKey:
    """Recover the shared key.

    Args:
        sk: Private key matching the public key used by the sender.
        ct: Ciphertext of m + p bits.
        cr_alice: Alice's estimate of the common-randomness bits.

    Returns:
        The shared key.

    Raises:
        DecapFailure: Some block did not decode (``blocks`` lists them), or the
            decoded symbols lie outside the key space (``blocks`` is empty).
        DimensionError: Ciphertext or common-randomness sizes do not match the key.
    """
    symbols, failed = recover_symbols(sk, ct, cr_alice)
    if failed.any():
        blocks = np.flatnonzero(failed).tolist()
        logger.debug(f"decode failed in {len(blocks)} of {sk.params.r} blocks")
        raise DecapFailure(blocks)
    try:
        return SharedKey.from_symbols(sk.params, symbols.tolist())
    except ValueError as exc:
        raise DecapFailure([], f"recovered symbols do not form a valid key: {exc}") from exc
