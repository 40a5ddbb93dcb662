"""Grayscale image container and PGM/PNG loading."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

# ITU-R BT.601 luminance weights for RGB ingestion.
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class GrayImage:
    """Real-valued luminance grid, row-major, values nominally in [0, 255]."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 3 or px.shape[1] < 3:
            raise InvalidInputError("image must be at least 3x3")
        if not np.all(np.isfinite(px)):
            raise InvalidInputError("image contains non-finite values")
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def from_rgb(rgb: np.ndarray) -> GrayImage:
    """Convert an (h, w, 3) array to luminance with BT.601 weights."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise InvalidInputError("expected an (h, w, 3) RGB array")
    return GrayImage(rgb @ _LUMA)


def _read_pgm(data: bytes) -> GrayImage:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise InvalidInputError("not a P2/P5 PGM file")

    # Tokenize the header, skipping '#' comments.
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise InvalidInputError("truncated PGM header")
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    width, height, maxval = (int(t) for t in tokens)
    if maxval <= 0 or maxval > 255:
        raise InvalidInputError(f"unsupported PGM maxval {maxval}")

    if magic == b"P5":
        pos += 1  # single whitespace after maxval
        if len(data) - pos < width * height:
            raise InvalidInputError("truncated PGM pixel data")
        raw = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    else:
        raw = np.array(data[pos:].split()[: width * height], dtype=np.float64)
    if raw.size != width * height:
        raise InvalidInputError("truncated PGM pixel data")
    return GrayImage(raw.reshape(height, width).astype(np.float64))


def load_image(path) -> GrayImage:
    """Load a PGM (P2/P5) or PNG image as luminance."""
    with open(path, "rb") as f:
        head = f.read(2)
        f.seek(0)
        data = f.read()
    if head in (b"P2", b"P5"):
        return _read_pgm(data)
    try:
        from PIL import Image

        with Image.open(path) as im:
            if im.mode in ("RGB", "RGBA", "P"):
                arr = np.asarray(im.convert("RGB"), dtype=np.float64)
                return from_rgb(arr)
            arr = np.asarray(im.convert("L"), dtype=np.float64)
            return GrayImage(arr)
    except InvalidInputError:
        raise
    except Exception as exc:
        raise InvalidInputError(f"cannot read image {path}: {exc}") from exc


def save_pgm(image: GrayImage, path) -> None:
    """Write as binary P5, quantizing to 8 bits."""
    px = np.clip(np.rint(image.pixels), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{image.width} {image.height}\n255\n".encode())
        f.write(px.tobytes())
