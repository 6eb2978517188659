"""JPEG-like block codec used to compare transforms.

Each 8x8 block goes through the integer fast algorithm (columns, then
rows), is scaled by d_i * d_j into the orthonormal coefficient domain, loses
every zigzag position >= r, and is reconstructed with the exact inverse of
the scaled transform. There is no quantization table or entropy coder;
retention alone sets the quality.

Retention zeroes fixed positions and the scaling is entrywise, so the two
commute: ``scale_before_retention`` only changes where the float rounding
happens. The level shift only moves the DC coefficient, which is always
retained. Both switches exist so experiments can confirm this.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from .exact_dct import N, dct_matrix
from .fast_transform import TransformPlan, apply_plan, build_plan
from .image_io import check_image
from .search import ApproximationRecord, Classification

# -- Pipeline constants ---------------------------------------------------------
LEVEL_SHIFT = 128
MAX_RETENTION = N * N
PIXEL_MIN, PIXEL_MAX = 0, 255

_CODEC_CLASSES = (Classification.ORTHOGONAL, Classification.NEAR_ORTHOGONAL, Classification.EXACT)


@dataclass(frozen=True)
class RetentionSpec:
    r: int

    def __post_init__(self):
        if not isinstance(self.r, (int, np.integer)) or not 1 <= self.r <= MAX_RETENTION:
            raise ValueError(f"Retention r must be an integer in [1, {MAX_RETENTION}], got {self.r!r}")


def zigzag_order() -> List[Tuple[int, int]]:
    """Standard JPEG zigzag scan: (0,0), (0,1), (1,0), (2,0), (1,1), (0,2), ..."""
    order: List[Tuple[int, int]] = []
    for s in range(2 * N - 1):
        rows = range(max(0, s - N + 1), min(s, N - 1) + 1)
        # even anti-diagonals run bottom-left to top-right
        if s % 2 == 0:
            rows = reversed(rows)
        order.extend((i, s - i) for i in rows)
    return order


def zigzag_mask(r: int) -> np.ndarray:
    """Boolean 8x8 mask of the first r zigzag positions."""
    spec = RetentionSpec(r)
    mask = np.zeros((N, N), dtype=bool)
    for i, j in zigzag_order()[:spec.r]:
        mask[i, j] = True
    return mask


@dataclass(frozen=True)
class BlockTransform:
    """Everything the codec needs from one record, precomputed.

    For approximations, ``forward`` integer coefficients Y = T B T^T come from
    the plan; ``d`` scales them to Z = D Y D. ``scaled_inverse`` maps Z back
    (T^T D if orthogonal, E Delta D^-1 otherwise) and ``integer_inverse`` maps
    Y back (T^-1).
    """
    name: str
    plan: Optional[TransformPlan]
    d: np.ndarray
    scaled_inverse: np.ndarray
    integer_inverse: np.ndarray

    @property
    def is_exact(self) -> bool:
        return self.plan is None

    @classmethod
    def from_record(cls, record: ApproximationRecord) -> "BlockTransform":
        if record.classification not in _CODEC_CLASSES:
            raise ValueError(
                f"Transform {record.name} is {record.classification.value}; "
                "the codec needs an orthogonal, near-orthogonal or exact transform"
            )
        if record.is_exact:
            c = dct_matrix()
            return cls(record.name, None, np.ones(N), c.T.copy(), c.T.copy())

        T = record.matrix.astype(np.float64)
        d = record.scaling.as_array()
        if record.classification is Classification.ORTHOGONAL:
            integer_inverse = T.T * (d ** 2)[np.newaxis, :]
        else:
            integer_inverse = record.inverse_factorization.as_float_array()
        scaled_inverse = integer_inverse / d[np.newaxis, :]
        return cls(record.name, build_plan(record), d, scaled_inverse, integer_inverse)


TransformLike = Union[ApproximationRecord, BlockTransform]


def _prepare(transform: TransformLike) -> BlockTransform:
    if isinstance(transform, BlockTransform):
        return transform
    return BlockTransform.from_record(transform)


# -- Blocking -------------------------------------------------------------------------

def image_to_blocks(image: np.ndarray) -> np.ndarray:
    """(H, W) -> (H/8 * W/8, 8, 8), row-major over blocks."""
    h, w = image.shape
    return image.reshape(h // N, N, w // N, N).transpose(0, 2, 1, 3).reshape(-1, N, N)


def blocks_to_image(blocks: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    h, w = shape
    return blocks.reshape(h // N, w // N, N, N).transpose(0, 2, 1, 3).reshape(h, w)


# -- Transforms ------------------------------------------------------------------------

def _integer_forward(plan: TransformPlan, blocks: np.ndarray) -> np.ndarray:
    """T . B . T^T for every block, through the plan (exact in int64)."""
    # axis 0 of the plan input indexes the rows of each block
    cols = apply_plan(plan, blocks.transpose(1, 0, 2))
    rows = apply_plan(plan, cols.transpose(2, 1, 0))
    return rows.transpose(1, 2, 0)


def forward_blocks(transform: TransformLike, blocks: np.ndarray, scaled: bool = True) -> np.ndarray:
    """Forward 2-D transform of a stack of blocks shaped (..., 8, 8).

    Args:
        transform: Record or prepared BlockTransform.
        blocks: Block stack; integer input keeps the integer stage exact.
        scaled: Apply d_i * d_j (default). The exact DCT ignores this.

    Returns:
        Float coefficients with the same shape as ``blocks``.
    """
    bt = _prepare(transform)
    arr = np.asarray(blocks)
    stack = arr.reshape(-1, N, N)
    if bt.is_exact:
        c = dct_matrix()
        out = c @ stack.astype(np.float64) @ c.T
    else:
        if np.issubdtype(stack.dtype, np.integer):
            stack = stack.astype(np.int64)
        else:
            stack = stack.astype(np.float64)
        out = _integer_forward(bt.plan, stack).astype(np.float64)
        if scaled:
            out = out * np.outer(bt.d, bt.d)
    return out.reshape(arr.shape)


def inverse_blocks(transform: TransformLike, coeffs: np.ndarray, scaled: bool = True) -> np.ndarray:
    """Exact inverse of forward_blocks with the same ``scaled`` flag."""
    bt = _prepare(transform)
    arr = np.asarray(coeffs, dtype=np.float64)
    inv = bt.scaled_inverse if scaled else bt.integer_inverse
    out = inv @ arr.reshape(-1, N, N) @ inv.T
    return out.reshape(arr.shape)


def _check_block(block: np.ndarray, label: str) -> np.ndarray:
    arr = np.asarray(block)
    if arr.shape != (N, N):
        raise ValueError(f"{label} must be {N}x{N}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{label} contains non-finite values")
    return arr


def forward_block(record: TransformLike, block: np.ndarray) -> np.ndarray:
    """Scaled 2-D transform of one 8x8 block."""
    return forward_blocks(record, _check_block(block, "block"))


def inverse_block(record: TransformLike, coeffs: np.ndarray) -> np.ndarray:
    return inverse_blocks(record, _check_block(coeffs, "coeffs"))


# -- Pipeline ----------------------------------------------------------------------------

def _round_pixels(values: np.ndarray) -> np.ndarray:
    clamped = np.clip(values, PIXEL_MIN, PIXEL_MAX)
    # non-negative after the clamp, so half-away-from-zero is floor(x + 0.5)
    return np.floor(clamped + 0.5).astype(np.uint8)


def analyze_image(
    transform: TransformLike,
    image: np.ndarray,
    scale_before_retention: bool = True,
    level_shift: bool = True,
) -> np.ndarray:
    """Forward coefficients of every block, ready for any retention r."""
    img = check_image(image)
    blocks = image_to_blocks(img).astype(np.int64)
    if level_shift:
        blocks = blocks - LEVEL_SHIFT
    return forward_blocks(transform, blocks, scaled=scale_before_retention)


def synthesize_image(
    transform: TransformLike,
    coeffs: np.ndarray,
    shape: Tuple[int, int],
    r: Union[int, RetentionSpec],
    scale_before_retention: bool = True,
    level_shift: bool = True,
) -> np.ndarray:
    """Keep the first r zigzag coefficients of each block and reconstruct."""
    bt = _prepare(transform)
    spec = r if isinstance(r, RetentionSpec) else RetentionSpec(r)
    kept = coeffs * zigzag_mask(spec.r)
    if not scale_before_retention and not bt.is_exact:
        kept = kept * np.outer(bt.d, bt.d)
    blocks = inverse_blocks(bt, kept, scaled=True)
    if level_shift:
        blocks = blocks + LEVEL_SHIFT
    return _round_pixels(blocks_to_image(blocks, shape))


def compress_image(
    record: TransformLike,
    image: np.ndarray,
    r: Union[int, RetentionSpec],
    scale_before_retention: bool = True,
    level_shift: bool = True,
) -> np.ndarray:
    """Compress and reconstruct a grayscale image with r coefficients per block.

    Args:
        record: Transform to use (exact DCT, orthogonal or near-orthogonal).
        image: 2-D uint8 array with sides that are multiples of 8.
        r: Retained coefficients per block, 1..64.
        scale_before_retention: Scale integer coefficients by d_i*d_j before
            zeroing (default) or after.
        level_shift: Subtract 128 before the forward transform.

    Returns:
        Reconstructed uint8 image of the same shape.

    Raises:
        ValueError: For bad dimensions, r outside [1, 64], or a degenerate
            or rejected transform.
    """
    spec = r if isinstance(r, RetentionSpec) else RetentionSpec(r)
    bt = _prepare(record)
    img = check_image(image)
    coeffs = analyze_image(bt, img, scale_before_retention, level_shift)
    return synthesize_image(bt, coeffs, img.shape, spec, scale_before_retention, level_shift)
