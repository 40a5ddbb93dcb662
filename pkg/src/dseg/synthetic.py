"""Deterministic synthetic test scenes.

All generators produce slightly blurred edges: an ideal 0/255 step has a
two-pixel Sobel plateau with no strict local maximum, which no real
camera produces and which would starve the seed selection.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.ndimage import gaussian_filter
from scipy.special import erf

from .image import GrayImage


def constant(width: int, height: int, value: float = 128.0) -> GrayImage:
    return GrayImage(np.full((height, width), float(value)))


def _smooth_step(x: np.ndarray, center: float, width: float) -> np.ndarray:
    """Gaussian-blurred unit step (0 to 1) centered at a sub-pixel position."""
    return 0.5 * (1.0 + erf((x - center) / (width * math.sqrt(2.0))))


def vertical_step(
    width: int,
    height: int,
    edge_x: float,
    lo: float = 0.0,
    hi: float = 255.0,
    smooth: float = 0.8,
) -> GrayImage:
    """Vertical step edge with an analytically smooth profile."""
    x = np.arange(width, dtype=np.float64)
    row = lo + (hi - lo) * _smooth_step(x, edge_x, smooth)
    return GrayImage(np.tile(row, (height, 1)))


def gapped_edge(
    width: int,
    height: int,
    edge_x: float,
    gap_start: int,
    gap_rows: int,
    smooth: float = 0.8,
    taper: int = 8,
) -> GrayImage:
    """Vertical step edge whose contrast vanishes on a band of rows.

    The contrast envelope is exactly zero on gap_rows rows and ramps back
    to full contrast linearly over taper rows on each side. A linear ramp
    has no two-sided contrast anywhere, so the envelope transition itself
    cannot seed spurious horizontal segments.
    """
    x = np.arange(width, dtype=np.float64)
    profile = 2.0 * _smooth_step(x, edge_x, smooth) - 1.0  # -1 .. +1
    y = np.arange(height, dtype=np.float64)
    dist = np.maximum(gap_start - y, y - (gap_start + gap_rows - 1))
    mask = np.clip(np.maximum(dist, 0.0) / taper, 0.0, 1.0)
    px = 128.0 + 127.0 * mask[:, None] * profile[None, :]
    return GrayImage(px)


def filled_square(
    size: int = 256,
    side: float = 200.0,
    center: tuple[float, float] | None = None,
    rotation_deg: float = 0.0,
    fg: float = 255.0,
    bg: float = 0.0,
    supersample: int = 4,
    blur: float = 1.0,
) -> GrayImage:
    """Anti-aliased filled square, optionally rotated."""
    if center is None:
        center = (size / 2.0, size / 2.0)
    n = size * supersample
    coords = (np.arange(n) + 0.5) / supersample - 0.5
    xx, yy = np.meshgrid(coords - center[0], coords - center[1])
    th = math.radians(rotation_deg)
    xr = xx * math.cos(th) + yy * math.sin(th)
    yr = -xx * math.sin(th) + yy * math.cos(th)
    inside = (np.abs(xr) <= side / 2.0) & (np.abs(yr) <= side / 2.0)
    hi = inside.astype(np.float64)
    px = hi.reshape(size, supersample, size, supersample).mean(axis=(1, 3))
    px = bg + (fg - bg) * px
    if blur > 0:
        px = gaussian_filter(px, blur)
    return GrayImage(px)


def square_corners(
    size: int = 256,
    side: float = 200.0,
    center: tuple[float, float] | None = None,
    rotation_deg: float = 0.0,
) -> list[tuple[float, float]]:
    """Ground-truth corner coordinates of filled_square."""
    if center is None:
        center = (size / 2.0, size / 2.0)
    th = math.radians(rotation_deg)
    h = side / 2.0
    out = []
    for sx, sy in ((-h, -h), (h, -h), (h, h), (-h, h)):
        x = sx * math.cos(th) - sy * math.sin(th) + center[0]
        y = sx * math.sin(th) + sy * math.cos(th) + center[1]
        out.append((x, y))
    return out


def _draw_rect(acc: np.ndarray, cx, cy, w, h, angle_deg, value, supersample):
    n = acc.shape[0]
    th = math.radians(angle_deg)
    ys, xs = np.mgrid[0:n, 0:n]
    xx = (xs + 0.5) / supersample - cx
    yy = (ys + 0.5) / supersample - cy
    xr = xx * math.cos(th) + yy * math.sin(th)
    yr = -xx * math.sin(th) + yy * math.cos(th)
    inside = (np.abs(xr) <= w / 2.0) & (np.abs(yr) <= h / 2.0)
    acc[inside] = value


def urban_scene(width: int = 640, height: int = 480, seed: int = 7) -> GrayImage:
    """Reference natural-style test image: high-contrast rectangular
    structures at varied orientations over a smooth background, mild
    blur and sensor-like noise.
    """
    rng = np.random.default_rng(seed)
    ss = 2
    n = max(width, height) * ss
    acc = np.empty((n, n))
    ys, xs = np.mgrid[0:n, 0:n]
    acc[:] = 70.0 + 40.0 * xs / n + 25.0 * ys / n  # illumination ramp

    specs = [
        # (cx, cy, w, h, angle, value)
        (110, 100, 120, 150, 0, 210),
        (110, 100, 80, 110, 0, 40),
        (300, 90, 150, 90, 0, 180),
        (480, 120, 130, 140, 15, 225),
        (560, 330, 110, 160, 0, 30),
        (200, 300, 170, 100, -20, 200),
        (80, 400, 100, 90, 35, 230),
        (360, 380, 140, 110, 5, 45),
        (360, 380, 90, 60, 5, 190),
        (500, 430, 150, 60, -10, 220),
        (260, 180, 60, 200, 60, 15),
        (420, 250, 220, 30, -35, 240),
    ]
    for cx, cy, w, h, ang, val in specs:
        _draw_rect(acc, cx, cy, w, h, ang, val, ss)
    px = acc.reshape(n // ss, ss, n // ss, ss).mean(axis=(1, 3))
    px = px[:height, :width]
    px = gaussian_filter(px, 1.0)
    px = px + rng.normal(0.0, 1.0, px.shape)
    # Sensor noise is low-pass filtered like in a demosaiced camera image;
    # unfiltered per-pixel noise would dominate the gradient magnitude floor.
    px = gaussian_filter(px, 0.8)
    return GrayImage(np.clip(px, 0.0, 255.0))
