"""Module containing runtime configuration variables."""

import logging
from functools import lru_cache
from os import getenv
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from two_ends_kernels.exceptions import BadEnvironmentError

logger = logging.getLogger(__name__)

AVAILABLE_ENVIRONMENTS = {"local", "test", "dev", "prod"}
ROOT_DIR = Path(__file__).resolve().parent.parent.parent


class Config(BaseSettings):
    """Configuration class for the laboratory."""

    model_config = SettingsConfigDict(
        env_file=Path(f"{ROOT_DIR}/.env-{getenv('ENVIRONMENT', 'local')}"),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    environment: str = "local"
    log_level: str = "INFO"

    # Output root for experiment artifacts, overridable with OUTPUT_ROOT
    output_root: Path = Path("results")

    # Dense oracle limits
    spectral_size_cap: int = Field(5000, ge=2)
    distance_cache_cap: int = Field(5000, ge=2)
    max_radii_per_center: int = Field(10_000, ge=2)

    # joblib workers; results are reassembled in submission order
    n_jobs: int = 1

    # Numerical tolerances
    orthonormality_tol: float = Field(1e-10, gt=0)
    residual_tol: float = Field(1e-8, gt=0)
    zero_mode_tol: float = Field(1e-11, gt=0)
    kernel_floor: float = Field(1e-10, gt=0)

    @field_validator("environment")
    @classmethod
    def validate_environment(cls, value: str) -> str:
        """Validate the environment."""
        if value not in AVAILABLE_ENVIRONMENTS:
            raise BadEnvironmentError(
                current_environment=value, allowed_environments=AVAILABLE_ENVIRONMENTS
            )
        return value


@lru_cache
def get_settings() -> Config:
    """Return the settings."""
    return Config()


config = get_settings()
