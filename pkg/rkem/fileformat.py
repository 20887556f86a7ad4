"""Key, ciphertext and common-randomness files.

Key file layout (all integers little-endian):

    magic "RKE1" | u16 version | u32 n | n bytes of JSON {"kind", "params"}
    then u32-length-prefixed sections

public sections:  P, labelings, R1, R2
private sections: A2, sigma (u32), punctured (u32), labelings, R1, R2

Labelings are r consecutive runs of f u16 codeword indices. Ciphertext
files hold magic "RKC1", u32 bit length and the packed bits.
"""

import json
import struct
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .codes import Labeling
from .errors import FormatError
from .gf2 import BitMatrix, BitVector
from .keygen import PrivateKey, PublicKey
from .kem import Ciphertext, CommonRandomnessView
from .params import ParamSet

KEY_MAGIC = b"RKE1"
CT_MAGIC = b"RKC1"
KEY_VERSION = 1

_KEY_HEADER = struct.Struct("<4sHI")
_CT_HEADER = struct.Struct("<4sI")
_LEN = struct.Struct("<I")

PathLike = Union[str, Path]


def _section(data: bytes) -> bytes:
    return _LEN.pack(len(data)) + data


def _u32(values: np.ndarray) -> bytes:
    return np.asarray(values, dtype="<u4").tobytes()


def _read_u32(data: bytes, name: str) -> np.ndarray:
    if len(data) % 4:
        raise FormatError(f"{name} section is not a whole number of u32 values")
    return np.frombuffer(data, dtype="<u4").astype(np.int64)


def _labelings_bytes(labelings) -> bytes:
    return b"".join(lab.to_bytes() for lab in labelings)


def _read_labelings(data: bytes, params: ParamSet) -> Tuple[Labeling, ...]:
    width = 2 * params.f
    if len(data) != width * params.r:
        raise FormatError(f"labelings section has {len(data)} bytes, expected {width * params.r}")
    return tuple(Labeling.from_bytes(data[i * width:(i + 1) * width]) for i in range(params.r))


def _encode_key(kind: str, params: ParamSet, sections: List[bytes]) -> bytes:
    meta = json.dumps({"kind": kind, "params": params.to_dict()}, sort_keys=True).encode("utf-8")
    return _KEY_HEADER.pack(KEY_MAGIC, KEY_VERSION, len(meta)) + meta + b"".join(_section(s) for s in sections)


def _decode_key(data: bytes, kind: str, count: int) -> Tuple[ParamSet, List[bytes]]:
    if len(data) < _KEY_HEADER.size:
        raise FormatError("truncated key header")
    magic, version, meta_len = _KEY_HEADER.unpack_from(data)
    if magic != KEY_MAGIC:
        raise FormatError(f"bad key magic {magic!r}")
    if version != KEY_VERSION:
        raise FormatError(f"unsupported key file version {version}")
    pos = _KEY_HEADER.size
    try:
        meta = json.loads(data[pos:pos + meta_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable key metadata: {exc}") from exc
    if meta.get("kind") != kind:
        raise FormatError(f"expected a {kind} key, found {meta.get('kind')!r}")
    try:
        params = ParamSet.from_dict(meta["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad parameter record: {exc}") from exc
    pos += meta_len

    sections = []
    for _ in range(count):
        if pos + _LEN.size > len(data):
            raise FormatError("truncated key file")
        (size,) = _LEN.unpack_from(data, pos)
        pos += _LEN.size
        if pos + size > len(data):
            raise FormatError("truncated key section")
        sections.append(data[pos:pos + size])
        pos += size
    if pos != len(data):
        raise FormatError(f"{len(data) - pos} trailing bytes after key sections")
    return params, sections


# -- public / private keys ------------------------------------------------


def public_key_to_bytes(pk: PublicKey) -> bytes:
    return _encode_key(
        "public",
        pk.params,
        [pk.P.to_bytes(), _labelings_bytes(pk.labelings), _u32(pk.R1), _u32(pk.R2)],
    )


def public_key_from_bytes(data: bytes) -> PublicKey:
    params, (p_raw, lab_raw, r1_raw, r2_raw) = _decode_key(data, "public", 4)
    try:
        return PublicKey(
            params=params,
            P=BitMatrix.from_bytes(p_raw),
            labelings=_read_labelings(lab_raw, params),
            R1=_read_u32(r1_raw, "R1"),
            R2=_read_u32(r2_raw, "R2"),
        )
    except ValueError as exc:
        raise FormatError(f"inconsistent public key: {exc}") from exc


def private_key_to_bytes(sk: PrivateKey) -> bytes:
    return _encode_key(
        "private",
        sk.params,
        [
            sk.A2.to_bytes(),
            _u32(sk.sigma),
            _u32(sk.punctured),
            _labelings_bytes(sk.labelings),
            _u32(sk.R1),
            _u32(sk.R2),
        ],
    )


def private_key_from_bytes(data: bytes) -> PrivateKey:
    params, (a2_raw, sigma_raw, punct_raw, lab_raw, r1_raw, r2_raw) = _decode_key(data, "private", 6)
    try:
        return PrivateKey(
            params=params,
            A2=BitMatrix.from_bytes(a2_raw),
            sigma=_read_u32(sigma_raw, "sigma"),
            punctured=_read_u32(punct_raw, "punctured"),
            labelings=_read_labelings(lab_raw, params),
            R1=_read_u32(r1_raw, "R1"),
            R2=_read_u32(r2_raw, "R2"),
        )
    except ValueError as exc:
        raise FormatError(f"inconsistent private key: {exc}") from exc


# -- ciphertext -----------------------------------------------------------


def ciphertext_to_bytes(ct: Ciphertext) -> bytes:
    return _CT_HEADER.pack(CT_MAGIC, ct.m_k.len) + ct.m_k.to_bytes()


def ciphertext_from_bytes(data: bytes) -> Ciphertext:
    if len(data) < _CT_HEADER.size:
        raise FormatError("truncated ciphertext header")
    magic, length = _CT_HEADER.unpack_from(data)
    if magic != CT_MAGIC:
        raise FormatError(f"bad ciphertext magic {magic!r}")
    return Ciphertext(m_k=BitVector.from_bytes(data[_CT_HEADER.size:], length))


# -- common-randomness bits -----------------------------------------------


def _bit_line(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in bits)


def _parse_bits(line: str, lineno: int) -> np.ndarray:
    line = line.strip()
    if set(line) - {"0", "1"}:
        raise FormatError(f"line {lineno} of cr-bits file holds characters other than 0/1")
    return np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")


def cr_bits_to_text(view: CommonRandomnessView) -> str:
    return f"{_bit_line(view.bits_r1)}\n{_bit_line(view.bits_r2)}\n"


def cr_bits_from_text(text: str, pk_or_sk=None) -> CommonRandomnessView:
    """Parse a cr-bits file; with a key given, check the line lengths against |R1|, |R2|."""
    lines = text.splitlines()
    while len(lines) < 2:
        lines.append("")
    if any(line.strip() for line in lines[2:]):
        raise FormatError("cr-bits file has more than two lines")
    view = CommonRandomnessView(bits_r1=_parse_bits(lines[0], 1), bits_r2=_parse_bits(lines[1], 2))
    if pk_or_sk is not None:
        try:
            view.check(pk_or_sk.R1, pk_or_sk.R2)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    return view


# -- paths ----------------------------------------------------------------


def write_bytes(path: PathLike, data: bytes) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(data)


def load_public_key(path: PathLike) -> PublicKey:
    return public_key_from_bytes(Path(path).read_bytes())


def load_private_key(path: PathLike) -> PrivateKey:
    return private_key_from_bytes(Path(path).read_bytes())


def load_ciphertext(path: PathLike, key=None) -> Ciphertext:
    """Read a ciphertext file.

    Args:
        path: File written by ``ciphertext_to_bytes``.
        key: Optional public or private key; the bit length must then be m + p.

    Returns:
        The ciphertext.

    Raises:
        FormatError: Bad header, or a length that does not match ``key``.
    """
    ct = ciphertext_from_bytes(Path(path).read_bytes())
    if key is not None:
        expected = key.params.m + key.params.p
        if ct.m_k.len != expected:
            raise FormatError(f"ciphertext has {ct.m_k.len} bits, key expects {expected}")
    return ct


def load_cr_bits(path: PathLike, key=None) -> CommonRandomnessView:
    return cr_bits_from_text(Path(path).read_text(encoding="utf-8"), key)


def save_cr_bits(path: PathLike, view: CommonRandomnessView) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(cr_bits_to_text(view), encoding="utf-8")
