"""Component codes for the per-block encoding."""

from .codebook import Codebook, Labeling, decode, decode_many, random_labeling
from .reed_muller import build_codebook

ALL_CODES = {
    "reed_muller": build_codebook,
}

__all__ = [
    "Codebook",
    "Labeling",
    "decode",
    "decode_many",
    "random_labeling",
    "build_codebook",
    "ALL_CODES",
]
