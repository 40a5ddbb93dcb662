"""Seed-and-grow line segment detection on the gradient field.

Pipeline: Sobel gradients -> seed selection on local gradient maxima ->
per-seed Kalman growth alternating both extension directions -> post-hoc
merging of overlapping collinear segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError
from .gradient import SAMPLE_MARGIN, GradientField, compute_gradient
from .image import GrayImage
from .interp import search_measures, seed_mask
from .line_model import (
    LineObservation,
    LineState,
    init_state,
    observation_matrix,
    predict_point,
    to_segment,
    update,
)



@dataclass(frozen=True)
class DetectorParams:
    """Detection parameters; defaults are the standard working set."""

    sigma_a: float = 0.05
    sigma_b: float = 0.05
    sigma_x0: float = 1.0
    sigma_y0: float = 1.0
    delta_t: float = 1.0
    tau_angle: float = 0.95
    tau_Gmax: float = 10.0
    n_o: int = 2
    sigma_r: float = 0.5
    min_support: int = 5
    max_consecutive_misses: int = 2
    chi2_merge: float = 5.99  # 95% quantile, 2 DOF

    def __post_init__(self):
        if min(self.sigma_a, self.sigma_b, self.sigma_x0, self.sigma_y0, self.sigma_r) <= 0:
            raise InvalidInputError("all standard deviations must be > 0")
        if not 0.0 < self.tau_angle < 1.0:
            raise InvalidInputError("tau_angle must be in (0, 1)")
        if self.delta_t <= 0:
            raise InvalidInputError("delta_t must be > 0")
        if self.n_o < 1:
            raise InvalidInputError("n_o must be >= 1")
        if self.min_support < 2:
            raise InvalidInputError("min_support must be >= 2")
        if self.max_consecutive_misses < 1:
            raise InvalidInputError("max_consecutive_misses must be >= 1")


@dataclass(frozen=True)
class Seed:
    """Local gradient maximum that starts a filter."""

    i: int
    j: int
    phi: float
    G: float


@dataclass(frozen=True)
class Segment:
    """Finished detection: a bounded portion of the supporting line."""

    p1: tuple[float, float]
    p2: tuple[float, float]
    state: LineState = field(repr=False)
    n_support: int
    length: float
    level: int = 0


def find_seeds(field: GradientField, params: DetectorParams) -> list[Seed]:
    """All interior pixels passing the four seed conditions.

    The two contrast tests look two pixels across the gradient direction
    (difference above tau_Gmax), the two local-max tests look one pixel
    along the hypothetical line. The latter are non-strict: on an ideal
    straight edge the along-line neighbors are exactly equal and must
    still seed. Sub-pixel neighbors are read with bicubic interpolation.
    Result is sorted by descending magnitude, ties broken by (row, column).
    """
    G = field.magnitude
    h, w = G.shape
    if h < 7 or w < 7:
        return []
    # Candidates need a 4 px margin so the 2 px probes stay sampleable.
    cand = G > params.tau_Gmax
    cand[:4, :] = cand[-4:, :] = False
    cand[:, :4] = cand[:, -4:] = False
    js, is_ = np.nonzero(cand)
    if js.size == 0:
        return []
    ok = seed_mask(G, field.direction, is_, js, params.tau_Gmax)
    is_, js = is_[ok], js[ok]
    if is_.size == 0:
        return []
    g0 = G[js, is_]
    phi = field.direction[js, is_]
    order = np.lexsort((is_, js, -g0))
    return [
        Seed(i=int(is_[n]), j=int(js[n]), phi=float(phi[n]), G=float(g0[n]))
        for n in order
    ]


def _cross_error_fast(P: np.ndarray, t: float, sigma_r: float) -> float:
    """Closed-form cross_error for the sparse H pattern at arc parameter t."""
    s00 = t * t * P[0, 0] + 2.0 * t * P[0, 1] + P[1, 1] + sigma_r * sigma_r
    s11 = t * t * P[2, 2] + 2.0 * t * P[2, 3] + P[3, 3] + sigma_r * sigma_r
    s01 = t * t * P[0, 2] + t * (P[0, 3] + P[1, 2]) + P[1, 3]
    half_tr = 0.5 * (s00 + s11)
    disc = math.sqrt(max(0.25 * (s00 - s11) ** 2 + s01 * s01, 0.0))
    return 3.0 * math.sqrt(max(half_tr + disc, 0.0))


def _observation_noise_fast(
    a: float, b: float, delta_t: float, sigma_r: float
) -> np.ndarray:
    """Closed-form observation_noise without trigonometric calls."""
    r2 = a * a + b * b
    d1 = delta_t * delta_t
    d2 = sigma_r * sigma_r
    c2 = a * a / r2
    s2 = b * b / r2
    cs = a * b / r2
    return np.array([[c2 * d1 + s2 * d2, cs * (d1 - d2)], [cs * (d1 - d2), s2 * d1 + c2 * d2]])


def search_observation(
    field: GradientField,
    state: LineState,
    t: float,
    gamma: int,
    params: DetectorParams,
) -> LineObservation | None:
    """Pick a support point among the measure set across the prediction.

    Builds 2*n_o+1 measures spaced by e/n_o along the cross-track unit
    vector, where e is the 3-sigma innovation window. A measure qualifies
    if its magnitude is a strict local maximum among the samples and its
    gradient direction is compatible with the line's normal reference
    atan2(-a, b) (the seed's gradient orientation, so edge polarity is
    preserved); the closest-to-line winner is returned, ties resolved by
    direction cosine.
    """
    px, py = predict_point(state, gamma * t)
    if not field.in_interior(px, py):
        return None
    e = _cross_error_fast(state.P, gamma * t, params.sigma_r)
    norm = state.direction_norm()
    nx, ny = -state.b / norm, state.a / norm
    found, sx, sy = search_measures(
        field.magnitude,
        field.gx,
        field.gy,
        px,
        py,
        nx,
        ny,
        e / params.n_o,
        params.n_o,
        params.tau_angle,
        state.a,
        state.b,
        float(SAMPLE_MARGIN),
    )
    if not found:
        return None
    R_k = _observation_noise_fast(state.a, state.b, params.delta_t, params.sigma_r)
    return LineObservation(point=(sx, sy), R_k=R_k)


def _extend(
    field: GradientField,
    state: LineState,
    params: DetectorParams,
    support: list[tuple[float, float]],
) -> LineState:
    """Grow both sides of the current state, alternating directions.

    A miss advances the probe a step delta_t further without an update;
    max_consecutive_misses misses close that side.
    """
    k = {1: 1, -1: 1}
    misses = {1: 0, -1: 0}
    open_side = {1: True, -1: True}
    while open_side[1] or open_side[-1]:
        for gamma in (1, -1):
            if not open_side[gamma]:
                continue
            t = k[gamma] * params.delta_t
            obs = search_observation(field, state, t, gamma, params)
            if obs is None:
                misses[gamma] += 1
                if misses[gamma] >= params.max_consecutive_misses:
                    open_side[gamma] = False
            else:
                H = observation_matrix(k[gamma], params.delta_t, gamma)
                state = update(state, H, obs)
                if gamma > 0:
                    state = replace(state, t_pos=max(state.t_pos, t))
                else:
                    state = replace(state, t_neg=min(state.t_neg, -t))
                misses[gamma] = 0
                support.append(obs.point)
            k[gamma] += 1
    return state


def _claim(claimed: np.ndarray, support: list[tuple[float, float]]) -> None:
    """Stamp support points into the occupancy mask with a 1 px radius."""
    h, w = claimed.shape
    for x, y in support:
        cj, ci = round(y), round(x)
        claimed[max(cj - 1, 0) : min(cj + 2, h), max(ci - 1, 0) : min(ci + 2, w)] = True


def grow_segment(
    field: GradientField,
    seed: Seed,
    params: DetectorParams,
    claimed: np.ndarray,
) -> Segment | None:
    """Run one filter from a seed; returns None for unsupported seeds."""
    if claimed[seed.j, seed.i]:
        return None
    state = init_state(seed.i, seed.j, seed.phi, params)
    support: list[tuple[float, float]] = [(float(seed.i), float(seed.j))]
    state = _extend(field, state, params, support)
    if len(support) < params.min_support or state.t_pos - state.t_neg <= 0:
        return None
    _claim(claimed, support)
    return to_segment(state, n_support=len(support))


def _project_t(seg: Segment, p: tuple[float, float]) -> float:
    """Arc parameter of p orthogonally projected on seg's supporting line."""
    st = seg.state
    d2 = st.a * st.a + st.b * st.b
    return ((p[0] - st.x0) * st.a + (p[1] - st.y0) * st.b) / d2


def _endpoints_compatible(base: Segment, other: Segment, params: DetectorParams) -> bool:
    """Chi-square test of other's extremities as observations of base."""
    st = base.state
    P = st.P
    p00, p01, p11 = P[0, 0], P[0, 1], P[1, 1]
    p22, p23, p33 = P[2, 2], P[2, 3], P[3, 3]
    p02, p03, p12, p13 = P[0, 2], P[0, 3], P[1, 2], P[1, 3]
    r2 = st.a * st.a + st.b * st.b
    d1 = params.delta_t**2
    d2 = params.sigma_r**2
    R00 = (st.a * st.a * d1 + st.b * st.b * d2) / r2
    R11 = (st.b * st.b * d1 + st.a * st.a * d2) / r2
    R01 = st.a * st.b * (d1 - d2) / r2
    overlap = False
    for p in (other.p1, other.p2):
        t = _project_t(base, p)
        if st.t_neg <= t <= st.t_pos:
            overlap = True
        s00 = t * t * p00 + 2.0 * t * p01 + p11 + R00
        s11 = t * t * p22 + 2.0 * t * p23 + p33 + R11
        s01 = t * t * p02 + t * (p03 + p12) + p13 + R01
        det = s00 * s11 - s01 * s01
        if det <= 0:
            return False
        r0 = p[0] - (st.a * t + st.x0)
        r1 = p[1] - (st.b * t + st.y0)
        d2 = (s11 * r0 * r0 - 2.0 * s01 * r0 * r1 + s00 * r1 * r1) / det
        if d2 >= params.chi2_merge:
            return False
    return overlap


def _fuse(s1: Segment, s2: Segment, params: DetectorParams) -> Segment:
    """Covariance-weighted Gaussian average of two segment states."""
    I1 = np.linalg.inv(s1.state.P)
    I2 = np.linalg.inv(s2.state.P)
    P = np.linalg.inv(I1 + I2)
    P = 0.5 * (P + P.T)
    x = P @ (I1 @ s1.state.vector + I2 @ s2.state.vector)
    fused = LineState(a=x[0], x0=x[1], b=x[2], y0=x[3], P=P)
    ts = [0.0]
    for p in (s1.p1, s1.p2, s2.p1, s2.p2):
        d2 = fused.a**2 + fused.b**2
        ts.append(((p[0] - fused.x0) * fused.a + (p[1] - fused.y0) * fused.b) / d2)
    fused = replace(fused, t_neg=min(ts), t_pos=max(ts))
    return to_segment(
        fused,
        n_support=s1.n_support + s2.n_support,
        level=min(s1.level, s2.level),
    )


def merge_segments(
    segments: list[Segment], params: DetectorParams | None = None
) -> list[Segment]:
    """Fuse overlapping collinear segments until a fixpoint is reached.

    Each pass prunes candidate pairs with a conservative bounding-box
    test before running the chi-square checks: an accepted endpoint must
    lie within sqrt(chi2 * lambda_max(S)) of the other segment, and
    lambda_max(S) is bounded through trace(P) and the extremal arc
    parameter. Passes repeat until none of them fuses anything.
    """
    if params is None:
        params = DetectorParams()
    segs = list(segments)
    lam_R = max(params.delta_t, params.sigma_r) ** 2
    while len(segs) >= 2:
        n = len(segs)
        minx = np.empty(n)
        maxx = np.empty(n)
        miny = np.empty(n)
        maxy = np.empty(n)
        margin = np.empty(n)
        for idx, s in enumerate(segs):
            minx[idx] = min(s.p1[0], s.p2[0])
            maxx[idx] = max(s.p1[0], s.p2[0])
            miny[idx] = min(s.p1[1], s.p2[1])
            maxy[idx] = max(s.p1[1], s.p2[1])
            tr = np.trace(s.state.P)
            t_max = max(abs(s.state.t_neg), abs(s.state.t_pos))
            margin[idx] = math.sqrt(params.chi2_merge * (tr * (1.0 + t_max * t_max) + lam_R))
        m = np.maximum(margin[:, None], margin[None, :])
        sep = (
            (minx[:, None] > maxx[None, :] + m)
            | (minx[None, :] > maxx[:, None] + m)
            | (miny[:, None] > maxy[None, :] + m)
            | (miny[None, :] > maxy[:, None] + m)
        )
        ii, jj = np.nonzero(~sep)
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
        consumed = np.zeros(n, dtype=bool)
        fused_list = []
        for i, j in zip(ii, jj):
            if consumed[i] or consumed[j]:
                continue
            a, b = segs[i], segs[j]
            if _endpoints_compatible(a, b, params) or _endpoints_compatible(b, a, params):
                fused_list.append(_fuse(a, b, params))
                consumed[i] = consumed[j] = True
        if not fused_list:
            break
        segs = [s for k, s in enumerate(segs) if not consumed[k]] + fused_list
    return segs


def detect(image: GrayImage, params: DetectorParams | None = None) -> list[Segment]:
    """Full detection pipeline; output sorted by descending length."""
    if params is None:
        params = DetectorParams()
    if image.width < 8 or image.height < 8:
        raise InvalidInputError("detection requires an image of at least 8x8")
    field = compute_gradient(image)
    seeds = find_seeds(field, params)
    claimed = np.zeros((image.height, image.width), dtype=bool)
    segments = []
    for seed in seeds:
        seg = grow_segment(field, seed, params, claimed)
        if seg is not None:
            segments.append(seg)
    segments = merge_segments(segments, params)
    segments.sort(key=lambda s: (-s.length, s.p1, s.p2))
    return segments
