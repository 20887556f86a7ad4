import pytest

from rkem.keygen import CommonRandomnessConfig, keygen
from rkem.params import ParamSet, from_preset
from rkem.randomness import Stream, make_rng


@pytest.fixture(scope="session")
def toy_params() -> ParamSet:
    return from_preset("toy8")


@pytest.fixture(scope="session")
def attack_params() -> ParamSet:
    return ParamSet.derive(7, 3, strict=False)


@pytest.fixture(scope="session")
def rm16_params() -> ParamSet:
    return from_preset("rm16")


@pytest.fixture(scope="session")
def toy_keys(toy_params):
    pk, sk, trace = keygen(toy_params, make_rng(11, Stream.KEYGEN), with_trace=True)
    return pk, sk, trace


@pytest.fixture(scope="session")
def toy_cr_keys(toy_params):
    pk, sk, _ = keygen(toy_params, make_rng(12, Stream.KEYGEN), CommonRandomnessConfig(r1_size=5, r2_size=4))
    return pk, sk


@pytest.fixture(scope="session")
def rm16_keys(rm16_params):
    pk, sk, trace = keygen(rm16_params, make_rng(7, Stream.KEYGEN), with_trace=True)
    return pk, sk, trace


@pytest.fixture(scope="session")
def rm16_mask_keys(rm16_params):
    pk, sk, _ = keygen(rm16_params, make_rng(8, Stream.KEYGEN), CommonRandomnessConfig(full_mask=True))
    return pk, sk
