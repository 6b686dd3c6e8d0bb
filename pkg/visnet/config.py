"""
VisNet configuration
Settings are read from VISNET_* environment variables and an optional .env file
"""

import os
from typing import Any

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime defaults for every analysis stage and the CLI"""

    model_config = SettingsConfigDict(
        env_prefix="VISNET_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    workers: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: str = "WARNING"
    seed: int = Field(default=20240412, ge=0, lt=2**64)

    # tailfit
    replicas: int = Field(default=1000, ge=100)
    bins_per_decade: int = Field(default=10, ge=1)
    kmin_candidates: int = Field(default=200, ge=1)
    min_tail_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)

    # metrics
    realizations: int = Field(default=20, ge=1)
    smallworld_lengths: int = Field(default=50, ge=1)
    small_window_cutoff: int = Field(default=500, ge=10)
    clustering_degree_ceiling: int = Field(default=100, ge=2)

    # dfa
    dfa_min_scale: int = Field(default=10, ge=4)
    dfa_scale_count: int = Field(default=50, ge=10)

    def __getitem__(self, key: str) -> Any:
        return getattr(self, key)


settings = Settings()
