"""
Process-level settings for the solver, read from ``PERIODIC_STOKES_*`` variables or a
``.env`` file. Everything that changes a result lives in the run configuration instead.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    THREADS: int = Field(
        1, ge=1, description="Workers for the time/tangential FFTs and the normal DST/DCT."
    )
    LOG_LEVEL: str = Field("INFO", description="Level handed to logging.basicConfig.")

    model_config = SettingsConfigDict(
        env_prefix="PERIODIC_STOKES_", env_file=".env", extra="ignore"
    )


_settings: Settings | None = None


def load_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def fft_workers() -> int:
    """Worker count for every ``scipy.fft`` call; results do not depend on it."""
    return load_settings().THREADS
