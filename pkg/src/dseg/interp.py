"""Catmull-Rom bicubic interpolation kernels.

The scalar path is the hot loop of segment growth, the batch path backs
whole-image seed selection. Both are jitted; results are identical.
"""

import numba
import numpy as np


@numba.njit(cache=True, inline="always")
def _cubic(p0, p1, p2, p3, t):
    # Catmull-Rom (a = -0.5) convolution, interpolating at the knots.
    return p1 + 0.5 * t * (
        p2
        - p0
        + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0))
    )


@numba.njit(cache=True)
def bicubic_at(arr, x, y):
    """Sample arr (row-major, indexed [y, x]) at a fractional position.

    Requires 1 <= floor(x) and floor(x) + 2 <= width - 1 (same for y);
    the caller is responsible for bounds.
    """
    ix = int(np.floor(x))
    iy = int(np.floor(y))
    fx = x - ix
    fy = y - iy
    r0 = _cubic(arr[iy - 1, ix - 1], arr[iy - 1, ix], arr[iy - 1, ix + 1], arr[iy - 1, ix + 2], fx)
    r1 = _cubic(arr[iy, ix - 1], arr[iy, ix], arr[iy, ix + 1], arr[iy, ix + 2], fx)
    r2 = _cubic(arr[iy + 1, ix - 1], arr[iy + 1, ix], arr[iy + 1, ix + 1], arr[iy + 1, ix + 2], fx)
    r3 = _cubic(arr[iy + 2, ix - 1], arr[iy + 2, ix], arr[iy + 2, ix + 1], arr[iy + 2, ix + 2], fx)
    return _cubic(r0, r1, r2, r3, fy)


@numba.njit(cache=True)
def bicubic_many(arr, xs, ys):
    """Vectorized bicubic_at over flat coordinate arrays."""
    out = np.empty(xs.shape[0], dtype=np.float64)
    for k in range(xs.shape[0]):
        out[k] = bicubic_at(arr, xs[k], ys[k])
    return out


@numba.njit(cache=True)
def seed_mask(mag, direction, is_, js, tau_gmax):
    """Evaluate the four seed conditions at candidate pixels.

    Conditions 1-2: contrast above tau_gmax two pixels across the gradient
    direction (one pixel would be blind to edges whose sub-pixel crest
    falls near a half-pixel boundary, where the magnitude has a two-pixel
    plateau). Conditions 3-4: local maximum (non-strict) one pixel along
    the hypothetical line. Early-outs keep the common reject path cheap.
    """
    n = is_.shape[0]
    out = np.zeros(n, dtype=np.bool_)
    for k in range(n):
        i = is_[k]
        j = js[k]
        x = float(i)
        y = float(j)
        g0 = mag[j, i]
        phi = direction[j, i]
        c = np.cos(phi)
        s = np.sin(phi)
        if g0 - bicubic_at(mag, x + 2.0 * c, y + 2.0 * s) <= tau_gmax:
            continue
        if g0 - bicubic_at(mag, x - 2.0 * c, y - 2.0 * s) <= tau_gmax:
            continue
        if g0 < bicubic_at(mag, x - s, y + c):
            continue
        if g0 < bicubic_at(mag, x + s, y - c):
            continue
        out[k] = True
    return out


@numba.njit(cache=True)
def search_measures(mag, gx, gy, px, py, nx, ny, step, n_o, tau_angle, a, b, margin):
    """Winner selection over the cross-track measure set.

    Samples 2*n_o+3 magnitudes spaced by step along (nx, ny) around the
    prediction (the outer two only serve as neighbors), keeps strict local
    maxima whose gradient direction matches the line's normal reference
    atan2(-a, b) within the cosine gate, and picks the smallest-|l|
    winner, ties resolved by direction cosine. Returns (found, x, y).
    """
    h, w = mag.shape
    n = 2 * n_o + 3
    ms = np.empty(n)
    ok = np.zeros(n, dtype=np.bool_)
    for idx in range(n):
        l = idx - n_o - 1
        sx = px + l * step * nx
        sy = py + l * step * ny
        if sx < margin or sx > w - 1 - margin or sy < margin or sy > h - 1 - margin:
            # Unsampleable positions can neither win nor veto a neighbor.
            ms[idx] = -1.0
        else:
            ms[idx] = bicubic_at(mag, sx, sy)
            ok[idx] = True
    norm = np.sqrt(a * a + b * b)
    best_abs_l = 1e30
    best_cos = -2.0
    best_x = 0.0
    best_y = 0.0
    found = False
    for idx in range(1, n - 1):
        m = ms[idx]
        if not ok[idx] or m <= 1e-12 or not (m > ms[idx - 1] and m > ms[idx + 1]):
            continue
        l = idx - n_o - 1
        sx = px + l * step * nx
        sy = py + l * step * ny
        sgx = bicubic_at(gx, sx, sy)
        sgy = bicubic_at(gy, sx, sy)
        g = np.sqrt(sgx * sgx + sgy * sgy)
        if g <= 1e-12:
            continue
        cos_d = (sgx * b - sgy * a) / (g * norm)
        if cos_d <= tau_angle:
            continue
        al = abs(l)
        if al < best_abs_l or (al == best_abs_l and cos_d > best_cos):
            best_abs_l = al
            best_cos = cos_d
            best_x = sx
            best_y = sy
            found = True
    return found, best_x, best_y
