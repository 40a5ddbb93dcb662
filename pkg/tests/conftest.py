"""Shared fixtures: small scenes and a one-off JIT warm-up."""

import numpy as np
import pytest

from dseg.detector import DetectorParams, detect
from dseg.synthetic import filled_square, urban_scene, vertical_step


@pytest.fixture(scope="session", autouse=True)
def warm_jit():
    """Compile the numba kernels once so timed tests measure the algorithm."""
    detect(filled_square(size=64, side=40, blur=0.45))


@pytest.fixture(scope="session")
def square_image():
    return filled_square(size=256, side=200, blur=0.45)


@pytest.fixture(scope="session")
def square_segments(square_image):
    return detect(square_image)


@pytest.fixture(scope="session")
def reference_scene():
    return urban_scene()


@pytest.fixture(scope="session")
def step_image():
    return vertical_step(64, 64, edge_x=31.3)


@pytest.fixture
def params():
    return DetectorParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
