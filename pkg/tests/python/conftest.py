import numpy as np
import pytest

from periodic_stokes.spectral_core import TorusPlaneGrid


@pytest.fixture(scope="session")
def grid() -> TorusPlaneGrid:
    """n = 2 with a small time and tangential lattice over a uniform normal grid."""
    return TorusPlaneGrid.create(
        n=2, time_modes=4, tangential_modes=16, x_max=20.0, nodes=81, grading="uniform"
    )


@pytest.fixture(scope="session")
def grid3() -> TorusPlaneGrid:
    """n = 3 smoke grid."""
    return TorusPlaneGrid.create(
        n=3, time_modes=2, tangential_modes=8, x_max=20.0, nodes=81, grading="uniform"
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


PROBLEM_BLOCK = """
[problem]
n = 2
q = 2.0
time_modes = 4
tangential_modes = 16
x_max = 20.0
nodes = 81
grading = "uniform"
"""


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration with the small problem block and return its path."""

    def write(body: str = "", problem: str = PROBLEM_BLOCK, name: str = "run.toml"):
        path = tmp_path / name
        path.write_text(f"version = 1\n{body}\n{problem}", encoding="utf-8")
        return path

    return write
