"""
rkem: randomized code-based key encapsulation with common-randomness consolidation.

Bob encapsulates a key as a concatenation of labeled Reed-Muller codewords
hidden behind a randomized public matrix P = B C; Alice, holding the private
factor A2 and the block map Z C1, strips the masking and decodes block by
block. Common-randomness bits shared over a noisy channel can be added on
top and are consolidated by the same decoder.

Example:
    >>> from rkem import from_preset, keygen, encapsulate, decapsulate, SharedKey
    >>> from rkem.randomness import Stream, make_rng
    >>> params = from_preset("rm16")
    >>> pk, sk, _ = keygen(params, make_rng(7, Stream.KEYGEN))
    >>> rng = make_rng(7, Stream.ENCAP)
    >>> key = SharedKey.random(params, rng)
    >>> ct, _ = encapsulate(pk, key, rng, budget=params.t)
    >>> decapsulate(sk, ct) == key
    True
"""

__version__ = "0.1.0"

from .errors import RkemError
from .kem import SharedKey, decapsulate, encapsulate
from .keygen import CommonRandomnessConfig, keygen
from .params import ParamSet, from_preset

__all__ = [
    "RkemError",
    "SharedKey",
    "decapsulate",
    "encapsulate",
    "CommonRandomnessConfig",
    "keygen",
    "ParamSet",
    "from_preset",
]
