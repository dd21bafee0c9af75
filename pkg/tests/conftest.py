import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def natural_image():
    """A 256x256 natural RGB test image (bundled, no download)."""
    from skimage import data

    img = data.astronaut()  # 512x512x3 uint8
    pooled = img.reshape(256, 2, 256, 2, 3).mean(axis=(1, 3))
    return pooled.astype(np.uint8)
