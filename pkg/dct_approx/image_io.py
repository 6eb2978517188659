"""8-bit grayscale image I/O.

Binary PGM (P5) is read and written natively. PNG goes through Pillow when
it is installed.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from .exact_dct import N

PathLike = Union[str, Path]

PGM_MAGIC = b"P5"
MAX_GRAY = 255
IMAGE_SUFFIXES = (".pgm", ".png")


def _require_pil():
    try:
        from PIL import Image
        return Image
    except ImportError:
        raise ImportError(
            "PNG input requested but Pillow is not installed. "
            "Install it with: pip install Pillow"
        )


def check_image(image: np.ndarray, label: str = "image") -> np.ndarray:
    """Validate a 2-D uint8 array whose sides are multiples of 8."""
    arr = np.asarray(image)
    if arr.ndim != 2:
        raise ValueError(f"{label} must be a 2-D grayscale array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"{label} must hold uint8 pixels, got dtype {arr.dtype}")
    height, width = arr.shape
    if height == 0 or width == 0 or height % N or width % N:
        raise ValueError(f"{label} dimensions must be positive multiples of {N}, got {width}x{height}")
    return arr


def _header_tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments."""
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("Truncated PGM header")
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pgm(path: PathLike) -> np.ndarray:
    """Load a binary 8-bit PGM as a (height, width) uint8 array.

    Raises:
        ValueError: On a non-P5 file, a maxval other than 255 or a short raster.
    """
    data = Path(path).read_bytes()
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != PGM_MAGIC:
        raise ValueError(f"{path}: not a binary PGM (magic {tokens[0]!r})")
    width, height, max_value = (int(t) for t in tokens[1:])
    if max_value > MAX_GRAY:
        raise ValueError(f"{path}: only 8-bit PGM is supported (maxval {max_value})")
    if max_value != MAX_GRAY:
        # metrics assume a 255 peak
        raise ValueError(f"{path}: maxval must be {MAX_GRAY}, got {max_value}")
    raster = data[offset:offset + width * height]
    if len(raster) != width * height:
        raise ValueError(f"{path}: expected {width * height} pixel bytes, found {len(raster)}")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def write_pgm(path: PathLike, image: np.ndarray) -> None:
    arr = np.asarray(image)
    if arr.ndim != 2 or arr.dtype != np.uint8:
        raise ValueError(f"write_pgm needs a 2-D uint8 array, got {arr.dtype} {arr.shape}")
    height, width = arr.shape
    header = b"%s\n%d %d\n%d\n" % (PGM_MAGIC, width, height, MAX_GRAY)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + arr.tobytes())


def read_png(path: PathLike) -> np.ndarray:
    Image = _require_pil()
    with Image.open(path) as img:
        if img.mode not in ("L", "P", "1"):
            raise ValueError(f"{path}: expected an 8-bit grayscale PNG, got mode {img.mode}")
        return np.asarray(img.convert("L"), dtype=np.uint8).copy()


def load_image(path: PathLike) -> np.ndarray:
    """Read a PGM or PNG by suffix and check it is codec-ready."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        image = read_pgm(path)
    elif suffix == ".png":
        image = read_png(path)
    else:
        raise ValueError(f"Unsupported image type {suffix!r}; expected one of {IMAGE_SUFFIXES}")
    return check_image(image, label=str(path))


def list_corpus(directory: PathLike) -> List[Path]:
    """Image files directly under `directory`, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Corpus directory not found: {directory}")
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
