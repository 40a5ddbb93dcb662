"""4-parameter line state and its Kalman algebra.

A line is x(t) = a*t + x0, y(t) = b*t + y0. The filter state is
(a, x0, b, y0) with a 4x4 covariance; the model is stationary with no
process noise, so prediction leaves state and covariance untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateSegmentError, UpdateDegenerateError

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class LineState:
    """Estimated supporting line with covariance and current extremities.

    t_neg <= 0 <= t_pos are the signed arc parameters of the two segment
    ends in the (a, b) parametrization.
    """

    a: float
    x0: float
    b: float
    y0: float
    P: np.ndarray = field(repr=False)
    t_pos: float = 0.0
    t_neg: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.x0, self.b, self.y0])

    def direction_norm(self) -> float:
        return math.hypot(self.a, self.b)


@dataclass(frozen=True)
class LineObservation:
    """A support point with its 2x2 observation covariance."""

    point: tuple[float, float]
    R_k: np.ndarray = field(repr=False)


def init_state(i: float, j: float, phi: float, params) -> LineState:
    """Fresh filter state from a seed at (i, j) with gradient direction phi."""
    P = np.diag(
        [params.sigma_a**2, params.sigma_x0**2, params.sigma_b**2, params.sigma_y0**2]
    )
    return LineState(a=-math.sin(phi), x0=float(i), b=math.cos(phi), y0=float(j), P=P)


def observation_matrix(k: int, delta_t: float, gamma: int) -> np.ndarray:
    """2x4 observation matrix at extension step k in direction gamma."""
    t = gamma * k * delta_t
    return np.array([[t, 1.0, 0.0, 0.0], [0.0, 0.0, t, 1.0]])


def predict_point(state: LineState, t: float) -> tuple[float, float]:
    return state.a * t + state.x0, state.b * t + state.y0


def cross_error(state: LineState, H: np.ndarray, sigma_r: float) -> float:
    """3-sigma half-width of the search window across the predicted point.

    Derived from the innovation covariance S = H P H^T + sigma_r^2 I.
    """
    S = H @ state.P @ H.T
    S[0, 0] += sigma_r**2
    S[1, 1] += sigma_r**2
    # Largest eigenvalue of a symmetric 2x2.
    half_tr = 0.5 * (S[0, 0] + S[1, 1])
    disc = math.sqrt(max(0.25 * (S[0, 0] - S[1, 1]) ** 2 + S[0, 1] * S[1, 0], 0.0))
    return 3.0 * math.sqrt(max(half_tr + disc, 0.0))


def observation_noise(state: LineState, delta_t: float, sigma_r: float) -> np.ndarray:
    """Observation covariance in the image frame.

    Along-track variance delta_t^2, cross-track variance sigma_r^2,
    rotated by the line angle alpha = atan2(b, a).
    """
    alpha = math.atan2(state.b, state.a)
    c, s = math.cos(alpha), math.sin(alpha)
    R = np.array([[c, -s], [s, c]])
    return R @ np.diag([delta_t**2, sigma_r**2]) @ R.T


def update(state: LineState, H: np.ndarray, obs: LineObservation) -> LineState:
    """Standard Kalman update; covariance re-symmetrized afterwards.

    The observation matrix always has the sparse pattern
    [[t, 1, 0, 0], [0, 0, t, 1]], which the gain computation exploits.
    """
    t = H[0, 0]
    P = state.P
    # P H^T columns (P is symmetric, so H P rows are their transposes).
    u = t * P[:, 0] + P[:, 1]
    v = t * P[:, 2] + P[:, 3]
    s00 = t * u[0] + u[1] + obs.R_k[0, 0]
    s11 = t * v[2] + v[3] + obs.R_k[1, 1]
    s01 = t * u[2] + u[3] + obs.R_k[0, 1]
    det = s00 * s11 - s01 * s01
    half_tr = 0.5 * (s00 + s11)
    disc = math.sqrt(max(half_tr * half_tr - det, 0.0))
    lam_min = half_tr - disc
    if lam_min <= 0 or (half_tr + disc) / lam_min > _COND_LIMIT:
        raise UpdateDegenerateError("innovation covariance numerically singular")
    k0 = (u * s11 - v * s01) / det
    k1 = (v * s00 - u * s01) / det
    r0 = obs.point[0] - (t * state.a + state.x0)
    r1 = obs.point[1] - (t * state.b + state.y0)
    x_new = state.vector + k0 * r0 + k1 * r1
    P_new = P - np.outer(k0, u) - np.outer(k1, v)
    P_new = 0.5 * (P_new + P_new.T)
    return replace(
        state, a=x_new[0], x0=x_new[1], b=x_new[2], y0=x_new[3], P=P_new
    )


def to_segment(state: LineState, n_support: int, level: int = 0):
    """Finished segment spanning [t_neg, t_pos] of the supporting line."""
    from .detector import Segment

    if state.t_pos - state.t_neg <= 0:
        raise DegenerateSegmentError("segment has zero extent")
    p1 = predict_point(state, state.t_neg)
    p2 = predict_point(state, state.t_pos)
    length = math.dist(p1, p2)
    return Segment(p1=p1, p2=p2, state=state, n_support=n_support, length=length, level=level)
