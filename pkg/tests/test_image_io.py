"""
Tests for PGM/PNG loading, writing and corpus listing.

Run:  pytest tests/test_image_io.py -v -s
"""

import sys
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from dct_approx.image_io import (
    check_image,
    list_corpus,
    load_image,
    read_pgm,
    write_pgm,
)


# ── Helpers ──────────────────────────────────────────────────────────────────

def _gradient(height: int = 16, width: int = 24) -> np.ndarray:
    return (np.arange(height * width) % 256).astype(np.uint8).reshape(height, width)


# ── PGM tests ───────────────────────────────────────────────────────────────

class TestPgm:
    def test_write_then_read(self, tmp_path):
        img = _gradient()
        write_pgm(tmp_path / "g.pgm", img)
        assert np.array_equal(read_pgm(tmp_path / "g.pgm"), img)

    def test_header_layout(self, tmp_path):
        write_pgm(tmp_path / "g.pgm", _gradient(8, 16))
        assert (tmp_path / "g.pgm").read_bytes().startswith(b"P5\n16 8\n255\n")

    def test_comments_in_header(self, tmp_path):
        raster = bytes(range(64))
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# made by hand\n8 8\n# max\n255\n" + raster)
        assert read_pgm(path).ravel().tolist() == list(range(64))

    def test_raster_starting_with_whitespace_byte(self, tmp_path):
        raster = bytes([10, 32] + [0] * 62)
        path = tmp_path / "w.pgm"
        path.write_bytes(b"P5 8 8 255\n" + raster)
        assert read_pgm(path)[0, :2].tolist() == [10, 32]

    def test_not_p5(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n8 8\n255\n" + bytes(64))
        with pytest.raises(ValueError, match="not a binary PGM"):
            read_pgm(path)

    def test_sixteen_bit(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n8 8\n65535\n" + bytes(128))
        with pytest.raises(ValueError, match="8-bit"):
            read_pgm(path)

    @pytest.mark.parametrize("maxval", [15, 100, 254])
    def test_low_maxval_rejected(self, tmp_path, maxval):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n8 8\n%d\n" % maxval + bytes(64))
        with pytest.raises(ValueError, match=f"maxval must be 255, got {maxval}"):
            read_pgm(path)

    def test_short_raster(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n8 8\n255\n" + bytes(10))
        with pytest.raises(ValueError, match="pixel bytes"):
            read_pgm(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P5\n8")
        with pytest.raises(ValueError, match="Truncated"):
            read_pgm(path)

    def test_write_rejects_float(self, tmp_path):
        with pytest.raises(ValueError, match="uint8"):
            write_pgm(tmp_path / "f.pgm", np.zeros((8, 8)))


# ── Load / check tests ──────────────────────────────────────────────────────

class TestLoad:
    def test_load_pgm(self, tmp_path):
        write_pgm(tmp_path / "g.pgm", _gradient())
        assert load_image(tmp_path / "g.pgm").shape == (16, 24)

    def test_load_rejects_odd_size(self, tmp_path):
        write_pgm(tmp_path / "g.pgm", _gradient(10, 16))
        with pytest.raises(ValueError, match="multiples of 8"):
            load_image(tmp_path / "g.pgm")

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "g.bmp"
        path.write_bytes(b"")
        with pytest.raises(ValueError, match="Unsupported image type"):
            load_image(path)

    def test_png(self, tmp_path):
        Image = pytest.importorskip("PIL.Image")
        img = _gradient()
        Image.fromarray(img).save(tmp_path / "g.png")
        assert np.array_equal(load_image(tmp_path / "g.png"), img)

    def test_png_colour_rejected(self, tmp_path):
        Image = pytest.importorskip("PIL.Image")
        Image.new("RGB", (8, 8)).save(tmp_path / "c.png")
        with pytest.raises(ValueError, match="grayscale"):
            load_image(tmp_path / "c.png")

    def test_check_image(self):
        assert check_image(_gradient()).dtype == np.uint8
        with pytest.raises(ValueError, match="2-D"):
            check_image(np.zeros((8, 8, 3), dtype=np.uint8))


# ── Corpus tests ────────────────────────────────────────────────────────────

class TestCorpus:
    def test_lists_images_sorted(self, tmp_path):
        for name in ("b.pgm", "a.PNG", "notes.txt", "c.pgm"):
            (tmp_path / name).write_bytes(b"")
        assert [p.name for p in list_corpus(tmp_path)] == ["a.PNG", "b.pgm", "c.pgm"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="Corpus directory"):
            list_corpus(tmp_path / "missing")
