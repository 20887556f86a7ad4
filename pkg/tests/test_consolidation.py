import math

import numpy as np
import pytest

from rkem.consolidation import (
    DelayModel,
    block_error_oracle,
    consolidation_curve,
    consolidation_experiment,
    consolidation_keys,
    exchange_frame,
    parse_sweep,
    simulate_exchange,
    threshold_bits,
)
from rkem.errors import BudgetError, ParamError
from rkem.keygen import keygen
from rkem.params import from_preset
from rkem.randomness import Stream, make_rng


def _sigma(p, n):
    return math.sqrt(max(p * (1 - p), 1e-12) / n)


def test_delay_model_validation():
    with pytest.raises(ParamError):
        DelayModel(loops=1)
    with pytest.raises(ParamError):
        DelayModel(packets=1)
    with pytest.raises(ParamError):
        DelayModel(jitter="pareto")
    with pytest.raises(ParamError):
        DelayModel(private_noise=0.0)
    assert DelayModel(loops=3).shared_segments == 4


def test_threshold_bits():
    assert threshold_bits(np.array([1.0, 2.0, 3.0, 10.0])).tolist() == [0, 0, 0, 1]


def test_shared_component_is_identical():
    samples, bits = simulate_exchange(DelayModel(packets=500), make_rng(1, Stream.RTT))
    assert np.allclose(samples.rtt_a - samples.private_a, samples.rtt_b - samples.private_b)
    assert np.all(samples.rtt_a > 0) and np.all(samples.rtt_b > 0)
    assert bits.disagreement_rate == np.mean(bits.bits_a != bits.bits_b)
    frame = exchange_frame(samples, bits)
    assert list(frame.columns) == ["packet_index", "rtt_a", "rtt_b", "bit_a", "bit_b"]
    assert len(frame) == 500


def test_noiseless_limit():
    model = DelayModel(packets=20_000, private_noise=1e-9)
    _, bits = simulate_exchange(model, make_rng(2, Stream.RTT))
    assert bits.disagreement_rate == 0.0
    assert np.array_equal(bits.bits_a, bits.bits_b)


def test_independent_limit():
    n = 100_000
    model = DelayModel(packets=n, jitter="normal", jitter_scale=1e-9, private_noise=1.0)
    _, bits = simulate_exchange(model, make_rng(3, Stream.RTT))
    assert abs(bits.disagreement_rate - 0.5) <= 3 * _sigma(0.5, n)


def test_bits_are_unbiased():
    n = 100_000
    _, bits = simulate_exchange(DelayModel(packets=n, jitter="normal"), make_rng(4, Stream.RTT))
    for arr in (bits.bits_a, bits.bits_b):
        assert abs(arr.mean() - 0.5) <= 3 * _sigma(0.5, n)


def test_disagreement_falls_with_shared_variance():
    n = 100_000
    rates = []
    for i, scale in enumerate(np.geomspace(0.05, 5.0, 10)):
        model = DelayModel(packets=n, jitter="normal", jitter_scale=float(scale), private_noise=0.5)
        _, bits = simulate_exchange(model, make_rng(5, Stream.RTT, i))
        rates.append(bits.disagreement_rate)
    for lo, hi in zip(rates[1:], rates[:-1]):
        assert lo <= hi + 3 * _sigma(hi, n)
    assert rates[-1] < rates[0]


def test_oracle_mixture():
    params = from_preset("rm16")
    assert block_error_oracle(params, 0.0) == 0.0
    assert 0.0 < block_error_oracle(params, 0.05) < block_error_oracle(params, 0.1) < 1.0


def test_zero_epsilon_has_no_errors(toy_params):
    point = consolidation_experiment(toy_params, epsilon=0.0, trials=50, seed=1)
    assert point.block_errors == 0 and point.key_failures == 0
    assert point.blocks == 50 * toy_params.r


def test_toy_matches_oracle(toy_params):
    eps = 0.1
    point = consolidation_experiment(toy_params, epsilon=eps, trials=3000, seed=2)
    expected = block_error_oracle(toy_params, eps)
    assert abs(point.block_error_rate - expected) <= 3 * _sigma(expected, point.blocks)
    assert abs(point.measured_disagreement - eps) < 0.02


def test_worker_count_does_not_change_totals(toy_params):
    keys = consolidation_keys(toy_params, 3)
    one = consolidation_experiment(toy_params, epsilon=0.15, trials=120, seed=3, keys=keys)
    many = consolidation_experiment(toy_params, epsilon=0.15, trials=120, seed=3, keys=keys, workers=4)
    assert one == many


def test_model_driven_disagreements(toy_params):
    model = DelayModel(jitter_scale=1.0, private_noise=0.3)
    point = consolidation_experiment(toy_params, model=model, trials=40, seed=4)
    assert 0.0 < point.measured_disagreement < 0.5
    assert point.epsilon == point.measured_disagreement


def test_experiment_preconditions(toy_params):
    with pytest.raises(BudgetError):
        consolidation_experiment(toy_params, epsilon=0.1, trials=5, w_inj=toy_params.t + 1)
    with pytest.raises(ValueError):
        consolidation_experiment(toy_params, trials=5)
    pk, sk, _ = keygen(toy_params, make_rng(0, Stream.KEYGEN))
    with pytest.raises(ParamError):
        consolidation_experiment(toy_params, epsilon=0.1, trials=5, keys=(pk, sk))


def test_curve_is_deterministic_and_monotone(toy_params):
    eps = [0.0, 0.1, 0.2, 0.3]
    a = consolidation_curve(toy_params, eps, trials=400, seed=6)
    b = consolidation_curve(toy_params, eps, trials=400, seed=6, workers=3)
    assert a.equals(b)
    assert list(a.columns) == ["epsilon", "block_error_rate", "key_failure_rate", "trials", "oracle_block_error_rate"]
    rates = a["block_error_rate"].to_numpy()
    assert rates[0] == 0.0
    assert np.all(np.diff(rates) >= -3 * _sigma(0.3, 400 * toy_params.r))
    assert "oracle_block_error_rate" not in consolidation_curve(toy_params, [0.05], trials=10, w_inj=1).columns


@pytest.mark.slow
@pytest.mark.parametrize("preset", ["rm16", "rm32"])
def test_oracle_match_at_scale(preset):
    params = from_preset(preset)
    keys = consolidation_keys(params, 10)
    trials = -(-100_000 // params.r)
    for i, eps in enumerate((0.01, 0.05, 0.1)):
        point = consolidation_experiment(params, epsilon=eps, trials=trials, seed=10, keys=keys, point_index=i, workers=4)
        expected = block_error_oracle(params, eps)
        assert abs(point.block_error_rate - expected) <= 3 * _sigma(expected, point.blocks) + 1e-5


@pytest.mark.slow
def test_stronger_code_lies_below():
    eps = [0.05, 0.1, 0.15, 0.2]
    rm16 = consolidation_curve(from_preset("rm16"), eps, trials=500, seed=11, workers=4)
    rm32 = consolidation_curve(from_preset("rm32"), eps, trials=500, seed=11, workers=4)
    assert np.all(rm32["block_error_rate"].to_numpy() <= rm16["block_error_rate"].to_numpy())


def test_parse_sweep():
    assert np.allclose(parse_sweep("0:0.1:5"), [0.0, 0.025, 0.05, 0.075, 0.1])
    assert parse_sweep("0.2:0.2:1").tolist() == [0.2]
    for bad in ("bad", "0:0.1", "0.2:0.1:3", "0:1.5:3", "0:0.1:0", "-0.1:0.1:2"):
        with pytest.raises(ParamError):
            parse_sweep(bad)
