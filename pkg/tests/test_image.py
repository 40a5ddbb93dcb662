"""Image container, color conversion and PGM/PNG I/O."""

import numpy as np
import pytest

from dseg.errors import InvalidInputError
from dseg.image import GrayImage, from_rgb, load_image, save_pgm


class TestGrayImage:
    def test_copies_input(self):
        src = np.full((4, 4), 10.0)
        img = GrayImage(src)
        src[0, 0] = 99.0
        assert img.pixels[0, 0] == 10.0

    def test_immutable(self):
        img = GrayImage(np.zeros((4, 4)))
        with pytest.raises(ValueError):
            img.pixels[0, 0] = 1.0

    def test_shape_properties(self):
        img = GrayImage(np.zeros((5, 7)))
        assert (img.width, img.height) == (7, 5)

    @pytest.mark.parametrize("shape", [(2, 5), (5, 2), (1, 1)])
    def test_too_small_rejected(self, shape):
        with pytest.raises(InvalidInputError):
            GrayImage(np.zeros(shape))

    def test_non_finite_rejected(self):
        px = np.zeros((4, 4))
        px[1, 1] = np.nan
        with pytest.raises(InvalidInputError):
            GrayImage(px)
        px[1, 1] = np.inf
        with pytest.raises(InvalidInputError):
            GrayImage(px)

    def test_non_2d_rejected(self):
        with pytest.raises(InvalidInputError):
            GrayImage(np.zeros((4, 4, 3)))


class TestFromRgb:
    def test_bt601_weights(self):
        rgb = np.zeros((3, 3, 3))
        rgb[..., 0] = 10.0
        rgb[..., 1] = 20.0
        rgb[..., 2] = 30.0
        img = from_rgb(rgb)
        expected = 0.299 * 10 + 0.587 * 20 + 0.114 * 30
        assert np.allclose(img.pixels, expected)

    def test_pure_channels(self):
        for ch, w in enumerate([0.299, 0.587, 0.114]):
            rgb = np.zeros((3, 3, 3))
            rgb[..., ch] = 100.0
            assert np.allclose(from_rgb(rgb).pixels, 100.0 * w)

    def test_bad_shape_rejected(self):
        with pytest.raises(InvalidInputError):
            from_rgb(np.zeros((4, 4)))
        with pytest.raises(InvalidInputError):
            from_rgb(np.zeros((4, 4, 4)))


class TestPgm:
    def test_p5_round_trip(self, tmp_path):
        px = np.arange(48, dtype=np.float64).reshape(6, 8)
        path = tmp_path / "img.pgm"
        save_pgm(GrayImage(px), path)
        back = load_image(path)
        assert np.array_equal(back.pixels, px)

    def test_p5_clamps_and_rounds(self, tmp_path):
        px = np.full((4, 4), 300.7)
        px[0, 0] = -5.0
        px[0, 1] = 127.5
        path = tmp_path / "img.pgm"
        save_pgm(GrayImage(px), path)
        back = load_image(path)
        assert back.pixels[0, 0] == 0.0
        assert back.pixels[1, 1] == 255.0
        assert back.pixels[0, 1] == 128.0  # round-half-even on .5

    def test_p2_with_comments(self, tmp_path):
        text = "P2\n# a comment\n3 # inline\n3\n255\n" + " ".join(str(v) for v in range(9))
        path = tmp_path / "ascii.pgm"
        path.write_bytes(text.encode())
        img = load_image(path)
        assert np.array_equal(img.pixels, np.arange(9.0).reshape(3, 3))

    def test_bad_maxval(self, tmp_path):
        path = tmp_path / "bad.pgm"
        path.write_bytes(b"P5\n3 3\n65535\n" + bytes(9))
        with pytest.raises(InvalidInputError):
            load_image(path)

    def test_truncated_pixels(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(5))
        with pytest.raises(InvalidInputError):
            load_image(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "head.pgm"
        path.write_bytes(b"P2\n4")
        with pytest.raises(InvalidInputError):
            load_image(path)


class TestPng:
    def test_gray_png_round_trip(self, tmp_path):
        from PIL import Image

        px = np.arange(64, dtype=np.uint8).reshape(8, 8)
        path = tmp_path / "img.png"
        Image.fromarray(px, mode="L").save(path)
        back = load_image(path)
        assert np.array_equal(back.pixels, px.astype(np.float64))

    def test_rgb_png_uses_luma(self, tmp_path):
        from PIL import Image

        rgb = np.zeros((8, 8, 3), dtype=np.uint8)
        rgb[..., 1] = 200
        path = tmp_path / "rgb.png"
        Image.fromarray(rgb, mode="RGB").save(path)
        back = load_image(path)
        assert np.allclose(back.pixels, 0.587 * 200)

    def test_garbage_file_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"\x00\x01\x02 definitely not an image")
        with pytest.raises(InvalidInputError):
            load_image(path)
