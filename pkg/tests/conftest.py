import numpy as np
import pytest

from pixmim import ImageTensor


def random_image(seed: int, height: int, width: int, channels: int = 1) -> ImageTensor:
    rng = np.random.default_rng(seed)
    return ImageTensor(rng.random((channels, height, width)))


def cosine_image(height: int, width: int, fy: int, fx: int, amplitude: float = 1.0) -> ImageTensor:
    """Real cosine at integer frequency (fy, fx); spectrum support is the
    conjugate bin pair at centered radius sqrt(fy² + fx²)."""
    h = np.arange(height)[:, None]
    w = np.arange(width)[None, :]
    plane = amplitude * np.cos(2.0 * np.pi * (fy * h / height + fx * w / width))
    return ImageTensor(plane[None, :, :])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
