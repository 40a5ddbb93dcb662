"""Coarse-to-fine detection over an image pyramid.

Segments found at the coarsest level are projected down level by level;
along each projected line an interval bookkeeping drives re-detection of
the covered arc ranges, splitting uncovered ranges until exhausted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .detector import (
    DetectorParams,
    Segment,
    _claim,
    _extend,
    merge_segments,
    search_observation,
)
from .detector import detect as detect_flat
from .errors import InvalidInputError
from .gradient import compute_gradient, build_pyramid
from .image import GrayImage
from .line_model import LineState, observation_matrix, to_segment, update

# Cross-track distance (px) within which a fine segment is considered to
# lie under a projected line and carves its intervals.
_CARVE_GATE = 2.0


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint, sorted arc-length ranges [p, q] along a projected segment."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        iv = tuple(sorted((float(p), float(q)) for p, q in self.intervals))
        for p, q in iv:
            if p >= q:
                raise InvalidInputError(f"empty or inverted interval [{p}, {q}]")
        for (_, q0), (p1, _) in zip(iv, iv[1:]):
            if p1 < q0:
                raise InvalidInputError("intervals overlap")
        object.__setattr__(self, "intervals", iv)

    @property
    def total_length(self) -> float:
        return sum(q - p for p, q in self.intervals)


@dataclass(frozen=True)
class HierarchicalParams:
    """Flat detection parameters plus the pyramid configuration."""

    base: DetectorParams = DetectorParams()
    n_p: int = 3
    s_p: float = 2.0

    def __post_init__(self):
        if self.n_p < 1:
            raise InvalidInputError("n_p must be >= 1")
        if not 1.0 < self.s_p <= 2.0:
            raise InvalidInputError("s_p must satisfy 1 < s_p <= 2")


def _carve_one(
    interval: tuple[float, float], idx1: float, idx2: float, min_len: float
) -> list[tuple[float, float]]:
    p, q = interval
    pieces = []
    if idx1 > p:
        pieces.append((p, min(idx1, q)))
    if idx2 < q:
        pieces.append((max(idx2, p), q))
    return [(a, b) for a, b in pieces if b - a > 0 and b - a >= min_len]


def carve_intervals(
    intervals: IntervalSet, idx1: float, idx2: float, min_len: float = 0.0
) -> IntervalSet:
    """Remove the range [idx1, idx2] from every interval.

    Pieces shorter than min_len are dropped; intervals not touching the
    removed range are kept unchanged.
    """
    if idx1 > idx2:
        raise InvalidInputError("idx1 must be <= idx2")
    out = []
    for iv in intervals.intervals:
        out.extend(_carve_one(iv, idx1, idx2, min_len))
    return IntervalSet(tuple(out))


def project_down(segment: Segment, s_p: float) -> Segment:
    """Predicted segment one pyramid level finer (coordinates scaled by s_p)."""
    st = segment.state
    D = np.diag([1.0, s_p, 1.0, s_p])
    P = D @ st.P @ D
    new_state = LineState(
        a=st.a,
        x0=st.x0 * s_p,
        b=st.b,
        y0=st.y0 * s_p,
        P=P,
        t_pos=st.t_pos * s_p,
        t_neg=st.t_neg * s_p,
    )
    return Segment(
        p1=(segment.p1[0] * s_p, segment.p1[1] * s_p),
        p2=(segment.p2[0] * s_p, segment.p2[1] * s_p),
        state=new_state,
        n_support=segment.n_support,
        length=segment.length * s_p,
        level=segment.level,
    )


def _axis(predicted: Segment) -> tuple[tuple[float, float], tuple[float, float]]:
    """Origin and unit direction of the projected line, p1 -> p2."""
    ox, oy = predicted.p1
    dx = predicted.p2[0] - ox
    dy = predicted.p2[1] - oy
    n = math.hypot(dx, dy)
    return (ox, oy), (dx / n, dy / n)


def _footprint(origin, u, seg: Segment) -> tuple[float, float]:
    idx = sorted(
        (p[0] - origin[0]) * u[0] + (p[1] - origin[1]) * u[1] for p in (seg.p1, seg.p2)
    )
    return idx[0], idx[1]


def _under_line(origin, u, seg: Segment, tau_angle: float) -> bool:
    """True when seg lies along the projected line, close in cross-track."""
    sx = seg.p2[0] - seg.p1[0]
    sy = seg.p2[1] - seg.p1[1]
    n = math.hypot(sx, sy)
    if n == 0 or abs((sx * u[0] + sy * u[1]) / n) <= tau_angle:
        return False
    for p in (seg.p1, seg.p2):
        cross = abs((p[0] - origin[0]) * -u[1] + (p[1] - origin[1]) * u[0])
        if cross > _CARVE_GATE:
            return False
    return True


def refine_at_level(
    field,
    predicted: Segment,
    params: DetectorParams,
    claimed: np.ndarray | None = None,
    already_found: list[Segment] | None = None,
    min_keep: float = 0.0,
) -> list[Segment]:
    """Re-detect a projected segment at the current (finer) level.

    Pops arc intervals of the projected line, probes each midpoint for a
    gradient maximum, grows with the standard machinery on a hit and
    carves the grown footprint, or splits the interval on a miss.
    Grown pieces shorter than min_keep still carve and claim their
    footprint but are not reported: they are below the scale the coarser
    level can confirm.
    """
    if claimed is None:
        claimed = np.zeros((field.height, field.width), dtype=bool)
    origin, u = _axis(predicted)
    try:
        intervals = IntervalSet(((0.0, predicted.length),))
    except InvalidInputError:
        return []
    for seg in already_found or []:
        if _under_line(origin, u, seg, params.tau_angle):
            i1, i2 = _footprint(origin, u, seg)
            intervals = carve_intervals(intervals, i1, i2, params.delta_t)

    P0 = np.diag(
        [params.sigma_a**2, params.sigma_x0**2, params.sigma_b**2, params.sigma_y0**2]
    )
    results: list[Segment] = []
    queue = list(intervals.intervals)
    while queue:
        p, q = queue.pop(0)
        r = 0.5 * (p + q)
        probe_x = origin[0] + r * u[0]
        probe_y = origin[1] + r * u[1]
        segment = None
        if field.in_interior(probe_x, probe_y):
            st = LineState(
                a=predicted.state.a,
                x0=probe_x,
                b=predicted.state.b,
                y0=probe_y,
                P=P0.copy(),
            )
            cj, ci = round(probe_y), round(probe_x)
            if not claimed[cj, ci]:
                obs = search_observation(field, st, 0.0, 1, params)
                # An observation landing on claimed ground is a previously
                # refined edge seen through a slightly offset projection.
                if obs is not None and claimed[round(obs.point[1]), round(obs.point[0])]:
                    obs = None
                if obs is not None:
                    H = observation_matrix(1, 0.0, 1)
                    st = update(st, H, obs)
                    support = [obs.point]
                    st = _extend(field, st, params, support)
                    if len(support) >= params.min_support and st.t_pos - st.t_neg > 0:
                        _claim(claimed, support)
                        segment = to_segment(st, n_support=len(support))
        if segment is None:
            # Miss: split at the midpoint, dropping sub-delta_t pieces.
            for piece in ((p, r), (r, q)):
                if piece[1] - piece[0] >= params.delta_t:
                    queue.append(piece)
            continue
        if segment.length >= min_keep:
            results.append(segment)
        i1, i2 = _footprint(origin, u, segment)
        # Carve the footprint from the popped interval; if it does not
        # touch it, split anyway so the loop always makes progress.
        own = _carve_one((p, q), i1, i2, params.delta_t)
        if own == [(p, q)]:
            own = [piece for piece in ((p, r), (r, q)) if piece[1] - piece[0] >= params.delta_t]
        queue.extend(own)
        # Carve from the remaining queued intervals as well.
        new_queue = []
        for iv in queue:
            new_queue.extend(_carve_one(iv, i1, i2, params.delta_t))
        queue = new_queue
    return results


def detect_hierarchical(
    image: GrayImage, params: HierarchicalParams | None = None
) -> list[Segment]:
    """Pyramidal detection; all returned segments are in level-0 coordinates."""
    if params is None:
        params = HierarchicalParams()
    if params.n_p == 1:
        return detect_flat(image, params.base)
    levels = build_pyramid(image, params.n_p, params.s_p)
    current = [
        replace(s, level=params.n_p - 1) for s in detect_flat(levels[-1], params.base)
    ]
    for lvl in range(params.n_p - 1, 0, -1):
        field = compute_gradient(levels[lvl - 1])
        claimed = np.zeros((levels[lvl - 1].height, levels[lvl - 1].width), dtype=bool)
        found: list[Segment] = []
        for seg in current:
            pred = project_down(seg, params.s_p)
            refined = refine_at_level(
                field,
                pred,
                params.base,
                claimed=claimed,
                already_found=found,
                min_keep=params.base.min_support * params.base.delta_t * params.s_p,
            )
            found.extend(replace(s, level=seg.level) for s in refined)
        current = found
    merged = merge_segments(current, params.base)
    merged.sort(key=lambda s: (-s.length, s.p1, s.p2))
    return merged
