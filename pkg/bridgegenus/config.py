"""Configuration for Bridgegenus.

Values come from the environment (prefix ``BRIDGEGENUS_``) or a local
``.env`` file. Nothing here depends on wall-clock time: the default seed
is a fixed constant so every randomized run is reproducible.
"""

from __future__ import annotations

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

DEFAULT_SEED: int = 20240601
ENV_PREFIX: str = "BRIDGEGENUS_"


class Settings(BaseSettings):
    """Runtime settings."""

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_file=".env",
        extra="ignore",
    )

    enumeration_cap: int = Field(default=14, ge=2)
    """Largest n accepted by exhaustive enumeration (3^(n-1) growth)."""

    default_seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)

    workers: int | None = Field(default=None, ge=1)
    """Worker processes for sampling. None means os.cpu_count()."""

    task_size: int = Field(default=64, ge=1)
    """Samples per Monte-Carlo task. Fixed so results ignore worker count."""

    time_budget_seconds: float | None = Field(default=None, gt=0)
    """Wall-time cap for a single estimate; exceeding it yields a partial report."""

    log_level: str = "WARNING"

    def resolved_workers(self) -> int:
        return self.workers or os.cpu_count() or 1

    def workers_from_env(self) -> bool:
        """True when the worker count was overridden through the environment."""
        return f"{ENV_PREFIX}WORKERS" in os.environ


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
