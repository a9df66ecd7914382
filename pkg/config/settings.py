"""
Configuration settings for the non-malleable code toolkit.

Uses pydantic-settings to load ``NMC_``-prefixed environment variables (or a
``.env`` file) with validation and development defaults. None of these values
change a computed result except ``sample_chunk_size``, which fixes how sampled
runs are seeded.
"""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="NMC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Execution
    threads: int = Field(default=1, ge=1, description="Default workers, and a cap on requested workers when set")
    log_level: str = Field(default="WARNING", description="Logging level")

    # Monte-Carlo mode
    default_samples: int = Field(default=1_000_000, ge=1, description="Samples per (f, s) pair")
    sample_chunk_size: int = Field(default=65_536, ge=1, description="Samples per seeded chunk")
    message_samples: int = Field(default=16, ge=1, description="Messages drawn when 2^k is too large to sweep")

    # Exact-mode limits
    exact_randomness_limit: int = Field(default=1 << 20, description="Max encoder randomness space")
    exact_message_bits_limit: int = Field(default=8, description="Max message bits for exact certification")
    codeword_enumeration_limit: int = Field(default=1 << 24, description="Cap for min_distance enumeration")
    amd_oracle_limit: int = Field(default=1 << 20, description="Cap for 2^(k + codeword bits) in the AMD oracle")

    # LECSS certification and search
    linearity_exhaustive_limit: int = Field(default=1 << 22, description="Max (c, delta) pairs checked exhaustively")
    linearity_samples: int = Field(default=1_000_000, ge=1, description="Sampled (c, delta) pairs otherwise")
    search_candidates_per_step: int = Field(default=64, ge=1, description="Candidate rows per greedy step")

    # Caching
    decode_cache_size: int = Field(default=65_536, ge=0, description="LRU size of the composed decoder cache")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of: {valid_levels}")
        return v.upper()

    def worker_cap(self, requested: Optional[int] = None) -> int:
        """Workers for a pool: ``requested`` capped by NMC_THREADS when that is set,
        NMC_THREADS (or its default) when nothing is requested."""
        if requested is None:
            return self.threads
        if "threads" in self.model_fields_set:
            return max(1, min(requested, self.threads))
        return max(1, requested)
