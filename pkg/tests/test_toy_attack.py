import math

import pytest

from rkem.errors import AttackGuardError, BudgetError
from rkem.gf2 import BitVector
from rkem.keygen import CommonRandomnessConfig
from rkem.kem import Ciphertext, recover_symbols
from rkem.params import from_preset
from rkem.security import keyspace_log2
from rkem.toy_attack import exhaustive_attack, make_instance


def test_true_key_always_accepted(attack_params):
    for seed in range(100):
        pk, _, ct, symbols = make_instance(attack_params, seed, attack_params.t)
        result = exhaustive_attack(pk, ct, attack_params.t)
        assert symbols in result.acceptors
        assert result.candidates_tested == attack_params.f ** attack_params.r == 196
        if result.unique:
            assert result.recovered_symbols == symbols


def test_zero_budget_instances(attack_params):
    for seed in range(20):
        pk, _, ct, symbols = make_instance(attack_params, seed, 0)
        assert symbols in exhaustive_attack(pk, ct, 0).acceptors


def test_count_matches_accounting(attack_params):
    pk, _, ct, _ = make_instance(attack_params, 0, 1)
    result = exhaustive_attack(pk, ct, 1)
    assert math.log2(result.candidates_tested) == pytest.approx(keyspace_log2(attack_params.r, attack_params.f))
    assert result.offsets_tested == (2 * (1 + attack_params.ell)) ** attack_params.r
    data = result.to_dict()
    assert data["acceptor_count"] == len(result.acceptors)


def test_instance_is_decryptable(attack_params):
    pk, sk, ct, symbols = make_instance(attack_params, 5, 1)
    got, failed = recover_symbols(sk, ct)
    assert not failed.any()
    assert tuple(got) == symbols


def test_masking_grows_acceptance_set(attack_params):
    cr = CommonRandomnessConfig(r1_size=4, r2_size=4)
    grew = 0
    runs = 40
    for seed in range(runs):
        pk, _, ct, symbols = make_instance(attack_params, seed, 1)
        pk_cr, _, ct_cr, symbols_cr = make_instance(attack_params, seed, 1, cr)
        assert symbols_cr == symbols
        assert pk_cr.P == pk.P
        plain = exhaustive_attack(pk, ct, 1)
        masked = exhaustive_attack(pk_cr, ct_cr, 1)
        assert symbols in masked.acceptors
        grew += len(masked.acceptors) > len(plain.acceptors)
    assert grew >= 0.95 * runs


def test_workers_give_same_result(attack_params):
    pk, _, ct, _ = make_instance(attack_params, 9, 1)
    assert exhaustive_attack(pk, ct, 1) == exhaustive_attack(pk, ct, 1, workers=3)


def test_guards(attack_params):
    pk, _, ct, _ = make_instance(attack_params, 1, 1)
    with pytest.raises(AttackGuardError):
        exhaustive_attack(pk, ct, 1, limit_log2=7)
    with pytest.raises(AttackGuardError):
        exhaustive_attack(pk, ct, 1, offset_limit_log2=8)
    with pytest.raises(BudgetError):
        exhaustive_attack(pk, ct, 2)


def test_real_parameters_are_refused(rm16_keys):
    pk, _, _ = rm16_keys
    with pytest.raises(AttackGuardError):
        exhaustive_attack(pk, Ciphertext(m_k=BitVector.zeros(pk.params.pk_rows)), 0)
    assert from_preset("rm16").f ** from_preset("rm16").r > 2 ** 20
