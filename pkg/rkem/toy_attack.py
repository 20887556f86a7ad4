"""Exhaustive search over concatenated component codewords at toy sizes.

Eve walks every symbol tuple, maps it to the concatenated codeword c', and
asks whether m_k + P c' can be explained by the public error budget: some
pad bits, some e1 of weight w1_j inside each block, any values on the
public common-randomness positions she cannot see, and a residual that sits
in the first m coordinates with at most w - w1_j ones per output block
(R2 coordinates ignored). By linearity the hidden offsets are enumerated
once as images P x and reused for every candidate.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from .errors import AttackGuardError, BudgetError
from .keygen import CommonRandomnessConfig, PrivateKey, PublicKey, keygen
from .kem import Ciphertext, CommonRandomnessView, encapsulate_symbols
from .params import ParamSet
from .randomness import Stream, make_rng

DEFAULT_LIMIT_LOG2 = 20
DEFAULT_OFFSET_LIMIT_LOG2 = 16
_CHUNK_BYTES = 1 << 25


@dataclass(frozen=True)
class AttackResult:
    recovered_symbols: Optional[Tuple[int, ...]]
    candidates_tested: int
    unique: bool
    acceptors: Tuple[Tuple[int, ...], ...]
    offsets_tested: int

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["acceptor_count"] = len(self.acceptors)
        return data


def _images(P: np.ndarray, xs: np.ndarray) -> np.ndarray:
    return ((xs.astype(np.int64) @ P.T.astype(np.int64)) & 1).astype(np.uint8)


def _xor_product(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """All pairwise XORs, left index varying slowest."""
    return (left[:, None, :] ^ right[None, :, :]).reshape(-1, left.shape[1])


def _candidate_images(pk: PublicKey, P: np.ndarray) -> np.ndarray:
    prm = pk.params
    book = prm.codebook
    images = np.zeros((1, P.shape[0]), dtype=np.uint8)
    for j, lab in enumerate(pk.labelings):
        xs = np.zeros((prm.f, prm.s), dtype=np.uint8)
        xs[:, j * prm.ell:j * prm.ell + prm.n] = book.words[lab.forward]
        images = _xor_product(images, _images(P, xs))
    return images


def _offset_images(pk: PublicKey, P: np.ndarray, w_total: int) -> Tuple[np.ndarray, np.ndarray]:
    """Images of every hidden offset and the w1 vector that goes with each."""
    prm = pk.params
    images = np.zeros((1, P.shape[0]), dtype=np.uint8)
    w1s = np.zeros((1, 0), dtype=np.int64)
    for j in range(prm.r):
        xs, ws = [], []
        for pad in (0, 1):
            for w1 in range(w_total + 1):
                for pos in itertools.combinations(range(prm.ell), w1):
                    x = np.zeros(prm.s, dtype=np.uint8)
                    x[prm.pad_coord(j)] = pad
                    x[j * prm.ell + np.array(pos, dtype=np.int64)] ^= 1
                    xs.append(x)
                    ws.append(w1)
        block_images = _images(P, np.array(xs))
        count = len(ws)
        images = _xor_product(images, block_images)
        w1s = np.hstack([np.repeat(w1s, count, axis=0), np.tile(np.array(ws), len(w1s))[:, None]])

    if pk.R1.size:
        patterns = ((np.arange(1 << pk.R1.size)[:, None] >> np.arange(pk.R1.size)) & 1).astype(np.uint8)
        xs = np.zeros((patterns.shape[0], prm.s), dtype=np.uint8)
        xs[:, pk.R1] = patterns
        images = _xor_product(images, _images(P, xs))
        w1s = np.repeat(w1s, patterns.shape[0], axis=0)
    return images, w1s


def _accept(y: np.ndarray, offsets: np.ndarray, w1s: np.ndarray, prm: ParamSet,
            visible: np.ndarray, w_total: int) -> np.ndarray:
    accepted = np.zeros(y.shape[0], dtype=bool)
    step = max(1, _CHUNK_BYTES // max(1, y.size))
    for start in range(0, offsets.shape[0], step):
        res = y[None, :, :] ^ offsets[start:start + step, None, :]
        clean_tail = ~res[:, :, prm.m:].any(axis=2)
        top = (res[:, :, :prm.m] & visible).reshape(res.shape[0], res.shape[1], prm.r, prm.n).sum(axis=3)
        room = (w_total - w1s[start:start + step])[:, None, :]
        ok = clean_tail & np.all(top <= room, axis=2)
        accepted |= ok.any(axis=0)
    return accepted


def exhaustive_attack(
    pk: PublicKey,
    ct: Ciphertext,
    true_budget: int,
    workers: int = 1,
    limit_log2: int = DEFAULT_LIMIT_LOG2,
    offset_limit_log2: int = DEFAULT_OFFSET_LIMIT_LOG2,
) -> AttackResult:
    prm = pk.params
    if not 0 <= true_budget <= prm.t:
        raise BudgetError(f"budget {true_budget} outside [0, t={prm.t}]")
    candidates = prm.f ** prm.r
    if candidates > (1 << limit_log2):
        raise AttackGuardError(f"f^r = {prm.f}^{prm.r} exceeds 2^{limit_log2} candidates")
    per_block = 2 * sum(math.comb(prm.ell, w) for w in range(true_budget + 1))
    offsets_count = per_block ** prm.r * (1 << pk.R1.size)
    if offsets_count > (1 << offset_limit_log2):
        raise AttackGuardError(f"{offsets_count} hidden offsets exceed 2^{offset_limit_log2}")

    P = pk.P.dense
    y = _candidate_images(pk, P) ^ ct.m_k.bits[None, :]
    offsets, w1s = _offset_images(pk, P, true_budget)
    visible = np.ones(prm.m, dtype=np.uint8)
    visible[pk.R2] = 0

    parts = np.array_split(np.arange(offsets.shape[0]), max(1, workers))
    parts = [idx for idx in parts if idx.size]

    def run(idx: np.ndarray) -> np.ndarray:
        return _accept(y, offsets[idx], w1s[idx], prm, visible, true_budget)

    if len(parts) == 1:
        accepted = run(parts[0])
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            accepted = np.logical_or.reduce(list(pool.map(run, parts)))

    hits = np.flatnonzero(accepted)
    acceptors = tuple(
        tuple(int(s) for s in np.unravel_index(i, (prm.f,) * prm.r)) for i in hits
    )
    logger.info(f"{len(acceptors)} of {candidates} candidates consistent with budget {true_budget}")
    return AttackResult(
        recovered_symbols=acceptors[0] if len(acceptors) == 1 else None,
        candidates_tested=candidates,
        unique=len(acceptors) == 1,
        acceptors=acceptors,
        offsets_tested=int(offsets.shape[0]),
    )


def make_instance(
    params: ParamSet,
    seed: int,
    budget: int,
    cr_config: Optional[CommonRandomnessConfig] = None,
) -> Tuple[PublicKey, PrivateKey, Ciphertext, Tuple[int, ...]]:
    """Key pair, random symbols and their ciphertext for one attack run.

    Instances that differ only in ``cr_config`` share P, labelings, symbols,
    pads and injected errors; only the common-randomness mask changes.
    """
    pk, sk, _ = keygen(params, make_rng(seed, Stream.KEYGEN), cr_config)
    enc_rng = make_rng(seed, Stream.ATTACK)
    symbols = tuple(int(s) for s in enc_rng.integers(0, params.f, size=params.r))
    cr_rng = make_rng(seed, Stream.CR)
    cr = CommonRandomnessView(
        bits_r1=cr_rng.integers(0, 2, size=pk.R1.size),
        bits_r2=cr_rng.integers(0, 2, size=pk.R2.size),
    )
    ct, _ = encapsulate_symbols(pk, symbols, enc_rng, cr, budget)
    return pk, sk, ct, symbols
