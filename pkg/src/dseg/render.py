"""Result rendering: SVG overlays and matplotlib report figures."""

from __future__ import annotations

import base64
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .detector import Segment
from .evaluation import MatchReport, length_histogram
from .image import GrayImage


def _color(length: float) -> str:
    if length < 20:
        return "#808080"
    if length <= 100:
        return "#1040d0"
    return "#d02020"


def svg_overlay(image: GrayImage, segments: list[Segment], path) -> None:
    """SVG with the raster embedded and segments color-coded by length."""
    from PIL import Image

    px = np.clip(np.rint(image.pixels), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(px, mode="L").save(buf, format="PNG")
    b64 = base64.b64encode(buf.getvalue()).decode()
    w, h = image.width, image.height
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" '
        f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<image width="{w}" height="{h}" xlink:href="data:image/png;base64,{b64}"/>',
    ]
    for s in segments:
        lines.append(
            f'<line x1="{s.p1[0]:.3f}" y1="{s.p1[1]:.3f}" x2="{s.p2[0]:.3f}" y2="{s.p2[1]:.3f}" '
            f'stroke="{_color(s.length)}" stroke-width="1.5"/>'
        )
    lines.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def save_length_histogram(segments: list[Segment], path, bin_width: float = 10.0) -> None:
    """Bar chart of the detected segment length distribution."""
    hist = length_histogram(segments, bin_width)
    fig, ax = plt.subplots(figsize=(6, 4))
    if hist:
        ks = sorted(hist)
        ax.bar(
            [k * bin_width for k in ks],
            [hist[k] for k in ks],
            width=0.9 * bin_width,
            align="edge",
        )
    ax.set_xlabel("segment length (px)")
    ax.set_ylabel("count")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_bench_plot(rows: list[tuple[int, MatchReport]], path) -> None:
    """Repeatability and counts as a function of the noise frame index."""
    idx = [i for i, _ in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax1.plot(idx, [r.repeatability for _, r in rows], "o-", color="#d02020")
    ax1.set_ylabel("repeatability")
    ax1.set_ylim(0, 1.05)
    ax2.plot(idx, [r.n_cur for _, r in rows], "o-", label="detected")
    ax2.plot(idx, [r.unmatched for _, r in rows], "s-", label="unmatched")
    ax2.plot(idx, [r.split for _, r in rows], "^-", label="split")
    ax2.set_xlabel("noise frame index")
    ax2.set_ylabel("segments")
    ax2.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
