"""DSeg: direct line segment detection with a linear Kalman filter."""

from .detector import DetectorParams, Seed, Segment, detect, find_seeds, grow_segment, merge_segments, search_observation
from .evaluation import MatchReport, add_noise, distance, length_histogram, match, similarity
from .gradient import GradientField, build_pyramid, compute_gradient, sample
from .hierarchical import (
    HierarchicalParams,
    IntervalSet,
    carve_intervals,
    detect_hierarchical,
    project_down,
    refine_at_level,
)
from .image import GrayImage, from_rgb, load_image, save_pgm
from .line_model import (
    LineObservation,
    LineState,
    cross_error,
    init_state,
    observation_matrix,
    observation_noise,
    predict_point,
    to_segment,
    update,
)

__all__ = [
    "DetectorParams",
    "GradientField",
    "GrayImage",
    "HierarchicalParams",
    "IntervalSet",
    "LineObservation",
    "LineState",
    "MatchReport",
    "Seed",
    "Segment",
    "add_noise",
    "build_pyramid",
    "carve_intervals",
    "compute_gradient",
    "cross_error",
    "detect",
    "detect_hierarchical",
    "distance",
    "find_seeds",
    "from_rgb",
    "grow_segment",
    "init_state",
    "length_histogram",
    "load_image",
    "match",
    "merge_segments",
    "observation_matrix",
    "observation_noise",
    "predict_point",
    "project_down",
    "refine_at_level",
    "sample",
    "save_pgm",
    "search_observation",
    "similarity",
    "to_segment",
    "update",
]

__version__ = "0.1.0"
