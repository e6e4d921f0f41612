"""Shared grid builders for the test suite."""

import numpy as np
import pytest

from solsurf import Grid1D, Grid2D


def circle_grid(n=129, span=2.0 * np.pi):
    # last point duplicates the first on periodic grids, so dx = span/(n-1)
    return Grid1D(0.0, span / (n - 1), n, "periodic")


def polar_band(n=65, scale=1):
    """Sphere test window: azimuth on x, polar angle on t, poles excluded."""
    m = (n - 1) * scale + 1
    gx = Grid1D(0.0, np.pi / 64 / scale, m, "one_sided")
    gt = Grid1D(0.3, (np.pi - 0.6) / 64 / scale, m, "one_sided")
    return Grid2D(gx, gt)


@pytest.fixture
def grid_small():
    return Grid1D(0.0, 2.0 * np.pi / 32, 33, "periodic")


@pytest.fixture
def band_small():
    gx = Grid1D(0.0, np.pi / 16, 17, "one_sided")
    gt = Grid1D(0.3, (np.pi - 0.6) / 16, 17, "one_sided")
    return Grid2D(gx, gt)
