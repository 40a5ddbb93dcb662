"""JSON segment files and CSV match reports."""

from __future__ import annotations

import csv
import json

import numpy as np

from .detector import Segment
from .errors import InvalidInputError
from .evaluation import MatchReport
from .line_model import LineState

_UPPER = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]

CSV_COLUMNS = ["frame_index", "detected", "matched", "unmatched", "split", "repeatability"]


def segment_to_record(seg: Segment) -> dict:
    st = seg.state
    return {
        "x1": seg.p1[0],
        "y1": seg.p1[1],
        "x2": seg.p2[0],
        "y2": seg.p2[1],
        "a": st.a,
        "x0": st.x0,
        "b": st.b,
        "y0": st.y0,
        "cov": [float(st.P[i, j]) for i, j in _UPPER],
        "n_support": seg.n_support,
        "length": seg.length,
        "level": seg.level,
    }


def record_to_segment(rec: dict) -> Segment:
    try:
        P = np.zeros((4, 4))
        for (i, j), v in zip(_UPPER, rec["cov"]):
            P[i, j] = P[j, i] = v
        p1 = (rec["x1"], rec["y1"])
        p2 = (rec["x2"], rec["y2"])
        a, x0, b, y0 = rec["a"], rec["x0"], rec["b"], rec["y0"]
        d2 = a * a + b * b
        ts = [((p[0] - x0) * a + (p[1] - y0) * b) / d2 for p in (p1, p2)]
        state = LineState(
            a=a, x0=x0, b=b, y0=y0, P=P, t_neg=min(ts + [0.0]), t_pos=max(ts + [0.0])
        )
        return Segment(
            p1=p1,
            p2=p2,
            state=state,
            n_support=int(rec["n_support"]),
            length=float(rec["length"]),
            level=int(rec.get("level", 0)),
        )
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise InvalidInputError(f"malformed segment record: {exc}") from exc


def write_segments(path, segments: list[Segment], width: int | None = None, height: int | None = None) -> None:
    doc = {"segments": [segment_to_record(s) for s in segments]}
    if width is not None:
        doc["image"] = {"width": width, "height": height}
    with open(path, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")


def read_segments(path) -> list[Segment]:
    with open(path) as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or "segments" not in doc or not isinstance(doc["segments"], list):
        raise InvalidInputError(f"{path}: not a segment JSON file")
    return [record_to_segment(r) for r in doc["segments"]]


def write_report_csv(path, rows: list[tuple[int, MatchReport]]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CSV_COLUMNS)
        for idx, rep in rows:
            w.writerow(
                [idx, rep.n_cur, rep.matched, rep.unmatched, rep.split, f"{rep.repeatability:.6f}"]
            )
