"""Scheme parameters and the named presets.

Everything follows from the security target ``sec`` and the Reed-Muller
parameter ``v``: r blocks of an (n+1)-bit slot (n-bit codeword plus one
pad bit), public key P of size (m+p) x s.
"""

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Any, Dict

import numpy as np
from loguru import logger

from .codes import ALL_CODES, Codebook
from .errors import ParamError


def component_count(sec: int, f: int) -> int:
    """Smallest r with f**r >= 2**sec, i.e. ceil(sec / log2 f) without float drift."""
    if f < 2:
        raise ValueError(f"need at least 2 codewords, got f={f}")
    r, size, target = 1, f, 1 << sec
    while size < target:
        r += 1
        size *= f
    return r


@lru_cache(maxsize=None)
def _codebook(code: str, v: int) -> Codebook:
    return ALL_CODES[code](v)


@dataclass(frozen=True)
class ParamSet:
    sec: int
    v: int
    code: str = "reed_muller"
    strict: bool = True
    n: int = field(init=False)
    f: int = field(init=False)
    t: int = field(init=False)
    r: int = field(init=False)
    ell: int = field(init=False)
    s: int = field(init=False)
    m: int = field(init=False)
    p: int = field(init=False)
    q: int = field(init=False)
    key_bits: int = field(init=False)

    def __post_init__(self):
        if self.sec < 1:
            raise ParamError(f"security level must be positive, got {self.sec}")
        if self.code not in ALL_CODES:
            raise ParamError(f"unknown component code family {self.code!r}")
        book = _codebook(self.code, self.v)
        r = component_count(self.sec, book.f)
        derived = {
            "n": book.n,
            "f": book.f,
            "t": book.t,
            "r": r,
            "ell": book.n + 1,
            "s": r * (book.n + 1),
            "m": r * book.n,
            "p": (r + 1) // 2,
            "q": r // 2,
            "key_bits": (book.f ** r).bit_length() - 1,
        }
        for name, value in derived.items():
            object.__setattr__(self, name, value)

        problems = self.violations()
        if problems and self.strict:
            raise ParamError("; ".join(problems))

    def violations(self):
        out = []
        if self.key_bits < self.sec:
            out.append(f"key_bits={self.key_bits} < sec={self.sec}")
        if self.p * self.p < self.sec:
            out.append(f"p^2={self.p * self.p} < sec={self.sec}")
        return out

    @classmethod
    def derive(cls, sec: int, v: int, strict: bool = True, code: str = "reed_muller") -> "ParamSet":
        """Derive a parameter set from a key length and a Reed-Muller order.

        Args:
            sec: Key length in bits.
            v: Component code order; codewords have n = 2**v bits.
            strict: Reject sets whose key space or B4 entropy falls short of ``sec``.
            code: Family name in ``ALL_CODES``.

        Returns:
            The frozen ParamSet. Non-strict shortfalls are logged as warnings.

        Raises:
            ParamError: Unknown code, bad ``v`` or ``sec``, or a strict shortfall.
        """
        params = cls(sec=sec, v=v, code=code, strict=strict)
        for problem in params.violations():
            logger.warning(f"non-strict parameter set sec={sec} v={v}: {problem}")
        return params

    @property
    def codebook(self) -> Codebook:
        return _codebook(self.code, self.v)

    @property
    def pk_rows(self) -> int:
        return self.m + self.p

    # block geometry: input coordinates [0, s) in slots of ell,
    # output coordinates [0, m) in slots of n

    def block_inputs(self, j: int) -> np.ndarray:
        return np.arange(j * self.ell, (j + 1) * self.ell)

    def block_outputs(self, j: int) -> np.ndarray:
        return np.arange(j * self.n, (j + 1) * self.n)

    def pad_coord(self, j: int) -> int:
        return j * self.ell + self.n

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ParamSet":
        try:
            params = cls(
                sec=int(data["sec"]),
                v=int(data["v"]),
                code=str(data.get("code", "reed_muller")),
                strict=bool(data.get("strict", True)),
            )
        except KeyError as exc:
            raise ParamError(f"parameter record missing {exc}") from exc
        for name in ("n", "f", "t", "r", "ell", "s", "m", "p", "q", "key_bits"):
            if name in data and int(data[name]) != getattr(params, name):
                raise ParamError(f"parameter record has {name}={data[name]}, derivation gives {getattr(params, name)}")
        return params


PRESET_SPECS = {
    "rm16": {"sec": 256, "v": 4, "strict": True},
    "rm32": {"sec": 256, "v": 5, "strict": True},
    "toy8": {"sec": 8, "v": 3, "strict": False},
}


def from_preset(name: str) -> ParamSet:
    try:
        spec = PRESET_SPECS[name]
    except KeyError:
        raise ParamError(f"unknown preset {name!r}; choose from {', '.join(PRESET_SPECS)}") from None
    params = ParamSet(**spec)
    for problem in params.violations():
        logger.debug(f"preset {name} is non-strict: {problem}")
    return params
