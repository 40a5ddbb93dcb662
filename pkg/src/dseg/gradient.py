"""Sobel gradient fields, sub-pixel sampling and image pyramids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfigurationError, InvalidInputError, OutOfBoundsError
from .image import GrayImage
from .interp import bicubic_at, bicubic_many

# Margin (pixels) from the border inside which sub-pixel sampling is valid.
SAMPLE_MARGIN = 2


@dataclass(frozen=True)
class GradientField:
    """Per-pixel gradient components, magnitude and direction of an image."""

    gx: np.ndarray = field(repr=False)
    gy: np.ndarray = field(repr=False)
    magnitude: np.ndarray = field(repr=False)
    direction: np.ndarray = field(repr=False)

    @property
    def width(self) -> int:
        return self.magnitude.shape[1]

    @property
    def height(self) -> int:
        return self.magnitude.shape[0]

    def in_interior(self, x: float, y: float) -> bool:
        """True when (x, y) is far enough from the border to be sampled."""
        return (
            SAMPLE_MARGIN <= x <= self.width - 1 - SAMPLE_MARGIN
            and SAMPLE_MARGIN <= y <= self.height - 1 - SAMPLE_MARGIN
        )


def compute_gradient(image: GrayImage) -> GradientField:
    """Raw (unnormalized) 3x3 Sobel responses; 1-pixel border zeroed."""
    px = image.pixels
    h, w = px.shape
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    # Separable Sobel: smooth [1,2,1] cross-track, difference [-1,0,1] along-track.
    sx = px[:, :-2] + 2.0 * px[:, 1:-1] + px[:, 2:]  # horizontal smooth, shape (h, w-2)
    sy = px[:-2, :] + 2.0 * px[1:-1, :] + px[2:, :]  # vertical smooth, shape (h-2, w)
    gx[1:-1, 1:-1] = sy[:, 2:] - sy[:, :-2]
    gy[1:-1, 1:-1] = sx[2:, :] - sx[:-2, :]
    mag = np.hypot(gx, gy)
    direction = np.arctan2(gy, gx)
    for a in (gx, gy, mag, direction):
        a.setflags(write=False)
    return GradientField(gx=gx, gy=gy, magnitude=mag, direction=direction)


def sample(field: GradientField, x: float, y: float) -> tuple[float, float]:
    """Bicubic (magnitude, direction) at a sub-pixel position.

    The gradient components are interpolated separately and the direction
    recovered with atan2, which avoids wrap-around artifacts of
    interpolating angles directly.
    """
    if not field.in_interior(x, y):
        raise OutOfBoundsError(f"sample point ({x}, {y}) outside valid interior")
    m = bicubic_at(field.magnitude, x, y)
    gx = bicubic_at(field.gx, x, y)
    gy = bicubic_at(field.gy, x, y)
    return m, math.atan2(gy, gx)


def sample_magnitude_many(field: GradientField, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Batch bicubic magnitude samples; caller guarantees interior points."""
    return bicubic_many(field.magnitude, np.ascontiguousarray(xs), np.ascontiguousarray(ys))


def _box_downscale(px: np.ndarray) -> np.ndarray:
    h, w = px.shape
    h2, w2 = h // 2, w // 2
    cropped = px[: 2 * h2, : 2 * w2]
    return 0.25 * (
        cropped[0::2, 0::2] + cropped[0::2, 1::2] + cropped[1::2, 0::2] + cropped[1::2, 1::2]
    )


def _bilinear_downscale(px: np.ndarray, s_p: float) -> np.ndarray:
    h, w = px.shape
    h2, w2 = int(h // s_p), int(w // s_p)
    ys = np.minimum(np.arange(h2) * s_p, h - 1.0)
    xs = np.minimum(np.arange(w2) * s_p, w - 1.0)
    y0 = np.minimum(ys.astype(int), h - 2)
    x0 = np.minimum(xs.astype(int), w - 2)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    p00 = px[np.ix_(y0, x0)]
    p01 = px[np.ix_(y0, x0 + 1)]
    p10 = px[np.ix_(y0 + 1, x0)]
    p11 = px[np.ix_(y0 + 1, x0 + 1)]
    return (1 - fy) * ((1 - fx) * p00 + fx * p01) + fy * ((1 - fx) * p10 + fx * p11)


def build_pyramid(image: GrayImage, n_p: int, s_p: float) -> list[GrayImage]:
    """Coarse-to-fine pyramid; index 0 is the full-resolution input."""
    if n_p < 1:
        raise InvalidConfigurationError("n_p must be >= 1")
    if not 1.0 < s_p <= 2.0:
        raise InvalidConfigurationError("scale factor must satisfy 1 < s_p <= 2")
    levels = [image]
    for _ in range(1, n_p):
        prev = levels[-1].pixels
        if s_p == 2.0:
            nxt = _box_downscale(prev)
        else:
            nxt = _bilinear_downscale(prev, s_p)
        if nxt.shape[0] < 8 or nxt.shape[1] < 8:
            raise InvalidConfigurationError(
                f"pyramid level {len(levels)} would be {nxt.shape[1]}x{nxt.shape[0]}, below 8x8"
            )
        levels.append(GrayImage(nxt))
    return levels
