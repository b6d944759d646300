import math

import numpy as np
import pytest

from ventriq.imaging import save_gray_image


def write_gray(path, pixels):
    """Write a uint8 image (PNG or PGM by extension) and return its path."""
    save_gray_image(path, np.asarray(pixels, dtype=np.uint8))
    return path


def write_mask(path, mask):
    """Write a boolean mask as a 0/255 image and return its path."""
    return write_gray(path, np.where(np.asarray(mask, dtype=bool), 255, 0))


def ellipse_mask(height, width, cx, cy, a, b, theta_deg=0.0):
    """Test-local solid-ellipse rasterizer (center-of-pixel inclusion).

    Kept separate from the library renderer so geometry checks do not lean
    on the code under test. a and b are semi-axes.
    """
    theta = math.radians(theta_deg)
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]
    x = cols - cx
    y = rows - cy
    xr = np.cos(theta) * x + np.sin(theta) * y
    yr = -np.sin(theta) * x + np.cos(theta) * y
    return (xr / a) ** 2 + (yr / b) ** 2 <= 1.0


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
