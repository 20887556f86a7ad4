"""Round-trip-time common randomness and end-to-end key consolidation.

Node A sends N packets that loop L times between A and B. Both nodes time
every packet; the 2L-2 middle segment delays are common to both
measurements, the first/last segment is private to each node. Each node
assigns bit 1 when its measured time exceeds its own mean.

The consolidation experiment puts every input coordinate under common
randomness (R1 = [0, s)), lets Bob and Alice hold copies that disagree at
rate epsilon, and counts how often a block (single codeword) or the whole
key fails to come back.
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.stats import binom, truncnorm

from .errors import BudgetError, ParamError
from .keygen import CommonRandomnessConfig, PrivateKey, PublicKey, keygen
from .kem import CommonRandomnessView, encapsulate_symbols, recover_symbols
from .params import ParamSet
from .randomness import Stream, make_rng

JITTER_FAMILIES = ("exponential", "normal")


@dataclass(frozen=True)
class DelayModel:
    """Delay model for the looped exchange (time unit: ms)."""

    loops: int = 2
    packets: int = 1000
    base_delay: float = 10.0
    jitter: str = "exponential"
    jitter_scale: float = 1.0
    private_noise: float = 0.2

    def __post_init__(self):
        if self.loops < 2:
            raise ParamError(f"need at least 2 loops for shared segments, got {self.loops}")
        if self.packets < 2:
            raise ParamError(f"need at least 2 packets, got {self.packets}")
        if self.jitter not in JITTER_FAMILIES:
            raise ParamError(f"unknown jitter family {self.jitter!r}")
        if min(self.base_delay, self.jitter_scale, self.private_noise) <= 0:
            raise ParamError("delay and noise scales must be positive")

    @property
    def shared_segments(self) -> int:
        return 2 * self.loops - 2


@dataclass(frozen=True, eq=False)
class RttSamples:
    shared: np.ndarray
    private_a: np.ndarray
    private_b: np.ndarray

    @property
    def rtt_a(self) -> np.ndarray:
        return self.shared + self.private_a

    @property
    def rtt_b(self) -> np.ndarray:
        return self.shared + self.private_b


@dataclass(frozen=True, eq=False)
class BitExtract:
    bits_a: np.ndarray
    bits_b: np.ndarray
    disagreement_rate: float


def _segment_delays(model: DelayModel, scale: float, size, rng: np.random.Generator) -> np.ndarray:
    if model.jitter == "exponential":
        return model.base_delay + rng.exponential(scale, size=size)
    # normal around the base delay, truncated so a segment never goes negative
    lower = -model.base_delay / scale
    return model.base_delay + truncnorm.rvs(lower, np.inf, loc=0.0, scale=scale, size=size, random_state=rng)


def threshold_bits(rtt: np.ndarray) -> np.ndarray:
    """1 where the travel time exceeds the node's own mean."""
    return (rtt > rtt.mean()).astype(np.uint8)


def simulate_exchange(model: DelayModel, rng: np.random.Generator) -> Tuple[RttSamples, BitExtract]:
    n = model.packets
    shared = _segment_delays(model, model.jitter_scale, (n, model.shared_segments), rng).sum(axis=1)
    private_a = _segment_delays(model, model.private_noise, n, rng)
    private_b = _segment_delays(model, model.private_noise, n, rng)
    samples = RttSamples(shared=shared, private_a=private_a, private_b=private_b)

    rtt_a, rtt_b = samples.rtt_a, samples.rtt_b
    if np.std(rtt_a) == 0 or np.std(rtt_b) == 0:
        raise ParamError("delay model produced constant round-trip times")
    bits_a = threshold_bits(rtt_a)
    bits_b = threshold_bits(rtt_b)
    eps = float(np.mean(bits_a != bits_b))
    return samples, BitExtract(bits_a=bits_a, bits_b=bits_b, disagreement_rate=eps)


def exchange_frame(samples: RttSamples, bits: BitExtract) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "packet_index": np.arange(samples.shared.size),
            "rtt_a": samples.rtt_a,
            "rtt_b": samples.rtt_b,
            "bit_a": bits.bits_a,
            "bit_b": bits.bits_b,
        }
    )


# -- consolidation --------------------------------------------------------


@dataclass(frozen=True)
class ConsolidationPoint:
    epsilon: float
    block_error_rate: float
    key_failure_rate: float
    trials: int
    blocks: int
    block_errors: int
    key_failures: int
    measured_disagreement: float


def block_error_oracle(params: ParamSet, epsilon: float) -> float:
    """Single-codeword error rate under i.i.d. disagreements and no injected errors.

    With probability 1/ell the pad is punctured and all n code bits survive,
    otherwise n-1 survive; the block fails exactly when more than t flips
    land on surviving code bits.
    """
    n, t, ell = params.n, params.t, params.ell
    return float(binom.sf(t, n, epsilon) / ell + (ell - 1) * binom.sf(t, n - 1, epsilon) / ell)


def _run_trials(
    pk: PublicKey,
    sk: PrivateKey,
    epsilon: Optional[float],
    model: Optional[DelayModel],
    w_inj: int,
    seed: int,
    point_index: int,
    trial_indices: Sequence[int],
) -> np.ndarray:
    prm = pk.params
    n1, n2 = pk.R1.size, pk.R2.size
    totals = np.zeros(4, dtype=np.int64)  # block errors, key failures, disagreements, cr bits
    for trial in trial_indices:
        rng = make_rng(seed, Stream.CONSOLIDATION, point_index, trial)
        symbols = rng.integers(0, prm.f, size=prm.r)
        if model is None:
            bob = rng.integers(0, 2, size=n1 + n2, dtype=np.uint8)
            alice = bob ^ (rng.random(n1 + n2) < epsilon).astype(np.uint8)
        else:
            _, extract = simulate_exchange(dataclasses.replace(model, packets=n1 + n2), rng)
            bob, alice = extract.bits_b, extract.bits_a
        bob_view = CommonRandomnessView(bits_r1=bob[:n1], bits_r2=bob[n1:])
        alice_view = CommonRandomnessView(bits_r1=alice[:n1], bits_r2=alice[n1:])

        ct, _ = encapsulate_symbols(pk, symbols, rng, bob_view, w_inj)
        got, failed = recover_symbols(sk, ct, alice_view)
        wrong = failed | (got != symbols)
        totals += (int(wrong.sum()), int(wrong.any()), int(np.sum(bob != alice)), n1 + n2)
    return totals


def _chunks(count: int, parts: int) -> List[range]:
    parts = max(1, min(parts, count))
    bounds = np.linspace(0, count, parts + 1).astype(int)
    return [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]


def consolidation_keys(params: ParamSet, seed: int) -> Tuple[PublicKey, PrivateKey]:
    """Full-mask key pair (R1 covers every input coordinate)."""
    pk, sk, _ = keygen(params, make_rng(seed, Stream.KEYGEN), CommonRandomnessConfig(full_mask=True))
    return pk, sk


def consolidation_experiment(
    params: ParamSet,
    *,
    epsilon: Optional[float] = None,
    model: Optional[DelayModel] = None,
    trials: int = 100,
    w_inj: int = 0,
    seed: int = 0,
    workers: int = 1,
    keys: Optional[Tuple[PublicKey, PrivateKey]] = None,
    point_index: int = 0,
) -> ConsolidationPoint:
    """Run ``trials`` encapsulations under disagreeing common randomness.

    Disagreements come either from an explicit rate ``epsilon`` or from the
    round-trip-time ``model``. Per-trial generators are derived from
    (seed, point_index, trial), so any worker count gives identical totals.
    """
    if (epsilon is None) == (model is None):
        raise ValueError("give exactly one of epsilon or model")
    if epsilon is not None and not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon {epsilon} outside [0, 1]")
    if not 0 <= w_inj <= params.t:
        raise BudgetError(f"injected weight {w_inj} outside [0, t={params.t}]")
    if trials < 1:
        raise ValueError("need at least one trial")
    pk, sk = keys or consolidation_keys(params, seed)
    if pk.R1.size != params.s:
        raise ParamError("consolidation needs R1 to cover all input coordinates")

    chunks = _chunks(trials, workers)
    args = (pk, sk, epsilon, model, w_inj, seed, point_index)
    if len(chunks) == 1:
        totals = _run_trials(*args, chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            totals = sum(pool.map(lambda chunk: _run_trials(*args, chunk), chunks))

    block_errors, key_failures, disagreements, cr_bits = (int(x) for x in totals)
    blocks = trials * params.r
    measured = disagreements / cr_bits if cr_bits else 0.0
    point = ConsolidationPoint(
        epsilon=float(epsilon) if epsilon is not None else measured,
        block_error_rate=block_errors / blocks,
        key_failure_rate=key_failures / trials,
        trials=trials,
        blocks=blocks,
        block_errors=block_errors,
        key_failures=key_failures,
        measured_disagreement=measured,
    )
    logger.debug(f"consolidation point {point}")
    return point


def parse_sweep(text: str) -> np.ndarray:
    """Parse ``lo:hi:steps`` into evenly spaced disagreement rates.

    Args:
        text: Sweep such as ``"0:0.1:5"``.

    Returns:
        ``steps`` values from ``lo`` to ``hi`` inclusive.

    Raises:
        ParamError: Malformed text, rates outside [0, 1], ``lo > hi`` or ``steps < 1``.
    """
    try:
        lo, hi, steps = text.split(":")
        lo_f, hi_f, n = float(lo), float(hi), int(steps)
    except ValueError:
        raise ParamError(f"sweep expects lo:hi:steps, got {text!r}") from None
    if n < 1 or not 0.0 <= lo_f <= hi_f <= 1.0:
        raise ParamError(f"bad sweep {text!r}: need 0 <= lo <= hi <= 1 and steps >= 1")
    return np.linspace(lo_f, hi_f, n)


def consolidation_curve(
    params: ParamSet,
    eps_values: Sequence[float],
    trials: int = 100,
    w_inj: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> pd.DataFrame:
    """Sweep epsilon with one full-mask key pair; one row per point."""
    keys = consolidation_keys(params, seed)
    rows = []
    for index, eps in enumerate(eps_values):
        point = consolidation_experiment(
            params, epsilon=float(eps), trials=trials, w_inj=w_inj,
            seed=seed, workers=workers, keys=keys, point_index=index,
        )
        row = {
            "epsilon": point.epsilon,
            "block_error_rate": point.block_error_rate,
            "key_failure_rate": point.key_failure_rate,
            "trials": point.trials,
        }
        if w_inj == 0:
            row["oracle_block_error_rate"] = block_error_oracle(params, point.epsilon)
        rows.append(row)
        logger.info(f"eps={eps:.4f}: block error {point.block_error_rate:.3e} over {point.blocks} blocks")
    return pd.DataFrame(rows)
