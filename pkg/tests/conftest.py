import numpy as np
import pytest

from twochlab import Field, State, make_grid


@pytest.fixture
def grid40():
    return make_grid(256, 40.0)


@pytest.fixture
def grid2pi():
    return make_grid(64, 2 * np.pi)


def random_band_limited(grid, rng, n_modes=8, amplitude=1.0):
    """Random smooth periodic samples from the lowest Fourier modes."""
    x = grid.nodes
    out = np.zeros(grid.n)
    for m in range(1, n_modes + 1):
        a, b = rng.normal(0.0, amplitude / m**2, size=2)
        out += a * np.cos(2 * np.pi * m * x / grid.length)
        out += b * np.sin(2 * np.pi * m * x / grid.length)
    return out


def random_state(grid, rng, u_amp=0.2, h_amp=0.1):
    """Random smooth state with H = 1 + small perturbation."""
    u = u_amp * random_band_limited(grid, rng)
    h = h_amp * random_band_limited(grid, rng)
    return State(Field(u, grid), Field(1.0 + h, grid), 0.0)


def gaussian_state(grid, center=20.0, width=1.0, u_amp=0.3, h_amp=0.1):
    bump = np.exp(-(((grid.nodes - center) / width) ** 2))
    return State(Field(u_amp * bump, grid), Field(1.0 + h_amp * bump, grid), 0.0)
