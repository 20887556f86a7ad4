"""Exception hierarchy for rkem."""

from typing import List, Optional


class RkemError(Exception):
    """Base class for every error raised by rkem."""


class DimensionError(RkemError, ValueError):
    """Operand shapes do not line up."""


class ParamError(RkemError, ValueError):
    """Parameter set out of the supported range or violating its invariants."""


class Singular(RkemError):
    """Matrix is not invertible over GF(2)."""


class ResampleExhausted(RkemError):
    """Rejection sampling did not produce an invertible matrix in time."""


class DecodeFailure(RkemError):
    """Minimum distance tied or beyond the correction radius."""


class DecapFailure(RkemError):
    """One or more blocks could not be decoded."""

    def __init__(self, blocks: List[int], message: Optional[str] = None):
        self.blocks = list(blocks)
        super().__init__(message or f"decapsulation failed in blocks {self.blocks}")


class BudgetError(RkemError, ValueError):
    """Error budget exceeds the component code's correction radius."""


class FormatError(RkemError):
    """Malformed key, ciphertext or common-randomness file."""


class AttackGuardError(RkemError, ValueError):
    """Parameters too large for exhaustive search."""
