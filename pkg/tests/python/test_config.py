import pytest

from periodic_stokes.config import Settings
from periodic_stokes.exceptions import (
    CompatibilityError,
    ConfigError,
    GridError,
    PreconditionError,
    StokesError,
)


class TestSettings:
    def test_defaults(self, monkeypatch):
        """One FFT worker and INFO logging unless the environment says otherwise."""
        monkeypatch.delenv("PERIODIC_STOKES_THREADS", raising=False)
        monkeypatch.delenv("PERIODIC_STOKES_LOG_LEVEL", raising=False)
        settings = Settings(_env_file=None)
        assert settings.THREADS == 1
        assert settings.LOG_LEVEL == "INFO"

    def test_environment_prefix(self, monkeypatch):
        """Settings are read from PERIODIC_STOKES_-prefixed variables."""
        monkeypatch.setenv("PERIODIC_STOKES_THREADS", "4")
        monkeypatch.setenv("PERIODIC_STOKES_LOG_LEVEL", "DEBUG")
        settings = Settings(_env_file=None)
        assert settings.THREADS == 4
        assert settings.LOG_LEVEL == "DEBUG"

    def test_thread_count_must_be_positive(self, monkeypatch):
        """A zero worker count is rejected."""
        monkeypatch.setenv("PERIODIC_STOKES_THREADS", "0")
        with pytest.raises(ValueError):
            Settings(_env_file=None)


class TestExceptions:
    def test_hierarchy(self):
        """Every library error derives from StokesError."""
        for error in (GridError, PreconditionError, CompatibilityError, ConfigError):
            assert issubclass(error, StokesError)

    def test_grid_error_is_value_error(self):
        """Invalid grid parameters can be caught as ValueError."""
        assert issubclass(GridError, ValueError)

    def test_compatibility_error_carries_frequencies(self):
        """The offending time frequencies travel with the error."""
        error = CompatibilityError("h_n has tangential mean", [-1, 1])
        assert isinstance(error, PreconditionError)
        assert error.frequencies == [-1, 1]
        assert CompatibilityError("no list").frequencies == []
