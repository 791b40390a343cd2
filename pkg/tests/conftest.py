import numpy as np
import pytest

from lifespan_lab import ComplexField, Grid1D


@pytest.fixture(scope="session")
def desk_grid():
    return Grid1D(32.0, 2048)


@pytest.fixture(scope="session")
def gaussian(desk_grid):
    return ComplexField(np.exp(-desk_grid.x**2 / 2.0), desk_grid, 0.0)


def random_smooth(rng: np.random.Generator, grid: Grid1D, t: float = 0.0) -> ComplexField:
    width = rng.uniform(0.8, 2.0)
    center = rng.uniform(-3.0, 3.0)
    carrier = rng.uniform(-2.0, 2.0)
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    z = (grid.x - center) / width
    vals = np.exp(-0.5 * z**2) * (c[0] + c[1] * z + c[2] * z**2) * np.exp(1j * carrier * grid.x)
    return ComplexField(vals, grid, t)
