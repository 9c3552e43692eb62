"""
Process configuration using Pydantic Settings.

Loads process-wide settings (logging, output location, worker pool size,
master seed) from environment variables with validation and type checking.
Per-run experiment parameters live in ``teql.schemas.run.RunConfig``.
"""

from pathlib import Path
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process settings loaded from ``TEQL_*`` environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="TEQL_",
        case_sensitive=False,
        extra="ignore",
    )

    # Output Configuration
    output_dir: Path = Field(
        default=Path("results"),
        description="Default directory for result bundles",
    )

    # Execution Configuration
    workers: int = Field(
        default=1,
        ge=1,
        description="Number of worker processes for variant x seed cells",
    )
    master_seed: int = Field(
        default=0,
        ge=0,
        description="Master seed from which every cell seed is derived",
    )

    # Logging Configuration
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="INFO",
        description="Log level",
    )
    log_format: Literal["json", "text"] = Field(
        default="text",
        description="Log format (json or text)",
    )

    # Development Settings
    debug: bool = Field(
        default=False,
        description="Include tracebacks in CLI error output",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: object) -> object:
        """Accept lower-case level names (TEQL_LOG_LEVEL=debug)."""
        return v.upper() if isinstance(v, str) else v


# Global settings instance
settings = Settings()
