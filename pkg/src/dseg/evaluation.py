"""Repeatability measurement: segment similarity, matching and noise injection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .detector import Segment
from .errors import InvalidInputError
from .image import GrayImage

#: Maximum accepted matching distance.
DEFAULT_TAU_DIST = 50.0

#: Sentinel for degenerate configurations that must never match.
NO_MATCH = math.inf


@dataclass(frozen=True)
class MatchReport:
    """Repeatability statistics between a reference and a current set."""

    n_ref: int
    n_cur: int
    matched: int
    unmatched: int
    split: int
    repeatability: float


def similarity(ab: Segment, cd: Segment) -> float:
    """Area between AB and its projection on CD, weighted by projected
    length, overlap ratio and angle cosine. 0 means identical; NO_MATCH
    flags a degenerate configuration (orthogonal or disjoint projections).
    """
    cx, cy = cd.p1
    dx = cd.p2[0] - cx
    dy = cd.p2[1] - cy
    len_cd = math.hypot(dx, dy)
    if len_cd == 0:
        raise InvalidInputError("degenerate segment CD")
    ux, uy = dx / len_cd, dy / len_cd

    # Along-track positions and signed cross-track offsets of A and B.
    ta = (ab.p1[0] - cx) * ux + (ab.p1[1] - cy) * uy
    tb = (ab.p2[0] - cx) * ux + (ab.p2[1] - cy) * uy
    ha = (ab.p1[0] - cx) * -uy + (ab.p1[1] - cy) * ux
    hb = (ab.p2[0] - cx) * -uy + (ab.p2[1] - cy) * ux

    proj_len = abs(tb - ta)
    if proj_len == 0:
        return NO_MATCH

    # Trapezoid (or double triangle when AB crosses the line) area.
    if ha * hb >= 0:
        area = 0.5 * (abs(ha) + abs(hb)) * proj_len
    else:
        area = 0.5 * (ha * ha + hb * hb) / (abs(ha) + abs(hb)) * proj_len

    lo, hi = min(ta, tb), max(ta, tb)
    inter = min(hi, len_cd) - max(lo, 0.0)
    union = max(hi, len_cd) - min(lo, 0.0)
    if inter <= 0 or union <= 0:
        return NO_MATCH
    overlap = min(inter / union, 1.0)

    abx = ab.p2[0] - ab.p1[0]
    aby = ab.p2[1] - ab.p1[1]
    len_ab = math.hypot(abx, aby)
    if len_ab == 0:
        return NO_MATCH
    cos_angle = abs(abx * ux + aby * uy) / len_ab
    if cos_angle == 0:
        return NO_MATCH
    return area / (proj_len * overlap * cos_angle)


def distance(ab: Segment, cd: Segment) -> float:
    """Symmetric matching distance: sim(AB, CD) + sim(CD, AB)."""
    s1 = similarity(ab, cd)
    s2 = similarity(cd, ab)
    return s1 + s2


def match(
    ref: list[Segment], cur: list[Segment], tau_dist: float = DEFAULT_TAU_DIST
) -> MatchReport:
    """Count mutually-nearest pairs under tau_dist.

    A reference segment is repeated iff its nearest current segment is
    unique, the nearest relation is mutual, and the distance is below
    tau_dist. A reference segment that is the nearest neighbor of two or
    more current segments counts as split.
    """
    n_ref, n_cur = len(ref), len(cur)
    if n_ref == 0 or n_cur == 0:
        return MatchReport(
            n_ref=n_ref,
            n_cur=n_cur,
            matched=0,
            unmatched=n_cur,
            split=0,
            repeatability=1.0 if n_ref == 0 and n_cur == 0 else 0.0,
        )
    D = np.empty((n_ref, n_cur))
    for i, r in enumerate(ref):
        for j, c in enumerate(cur):
            D[i, j] = distance(r, c)

    # Nearest reference of each current segment (for mutuality and splits).
    nearest_ref = D.argmin(axis=0)
    matched_cur: set[int] = set()
    matched = 0
    for i in range(n_ref):
        row = D[i]
        j = int(row.argmin())
        d = row[j]
        if not math.isfinite(d) or d >= tau_dist:
            continue
        if np.count_nonzero(row == d) > 1:
            continue  # nearest current segment is not unique
        if nearest_ref[j] != i or D[nearest_ref[j], j] != D[i, j]:
            continue
        col = D[:, j]
        if np.count_nonzero(col == col.min()) > 1:
            continue  # mutual-nearest relation not unique
        matched += 1
        matched_cur.add(j)
    split = int(np.count_nonzero(np.bincount(nearest_ref, minlength=n_ref) >= 2))
    return MatchReport(
        n_ref=n_ref,
        n_cur=n_cur,
        matched=matched,
        unmatched=n_cur - len(matched_cur),
        split=split,
        repeatability=matched / n_ref,
    )


def add_noise(image: GrayImage, i: int, rng_seed: int = 0) -> GrayImage:
    """Additive and multiplicative Gaussian noise with sigma = 5*i.

    out = (1 + N(0, sigma/255)) * in + N(0, sigma), clamped to [0, 255].
    Frame 0 is the untouched input; results are reproducible per seed.
    """
    if i < 0:
        raise InvalidInputError("frame index must be >= 0")
    if i == 0:
        return image
    sigma = 5.0 * i
    rng = np.random.default_rng(rng_seed)
    px = image.pixels
    mult = 1.0 + rng.normal(0.0, sigma / 255.0, px.shape)
    add = rng.normal(0.0, sigma, px.shape)
    return GrayImage(np.clip(mult * px + add, 0.0, 255.0))


def length_histogram(segments: list[Segment], bin_width: float) -> dict[int, int]:
    """Counts of segment lengths per [k*w, (k+1)*w) bin."""
    if bin_width <= 0:
        raise InvalidInputError("bin_width must be > 0")
    hist: dict[int, int] = {}
    for s in segments:
        k = int(s.length // bin_width)
        hist[k] = hist.get(k, 0) + 1
    return hist
