"""Runtime settings from environment variables (and an optional .env file)."""

import os
from dataclasses import dataclass

from dotenv import load_dotenv


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default


@dataclass(frozen=True)
class Settings:
    log_level: str = "WARNING"
    workers: int = 1
    resample_limit: int = 64
    attack_limit_log2: int = 20
    attack_offset_limit_log2: int = 16


def get_settings() -> Settings:
    """Read settings; values already in the environment win over .env."""
    load_dotenv(override=False)
    return Settings(
        log_level=(os.getenv("RKEM_LOG_LEVEL") or "WARNING").upper(),
        workers=max(1, _env_int("RKEM_WORKERS", 1)),
        resample_limit=max(1, _env_int("RKEM_RESAMPLE_LIMIT", 64)),
        attack_limit_log2=_env_int("RKEM_ATTACK_LIMIT_LOG2", 20),
        attack_offset_limit_log2=_env_int("RKEM_ATTACK_OFFSET_LIMIT_LOG2", 16),
    )
