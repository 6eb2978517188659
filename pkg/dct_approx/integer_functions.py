"""The ten integer functions used to map alpha*C onto integer matrices.

Ties and integer boundaries are detected with an absolute tolerance rather
than float equality, because the alpha sweep evaluates exactly those points.
"""

import math
from enum import Enum
from typing import Optional

import numpy as np

# -- Tolerances -------------------------------------------------------------
TIE_TOLERANCE = 1e-9


class IntFuncKind(str, Enum):
    FLOOR = "floor"
    CEIL = "ceil"
    TRUNC = "trunc"
    ROUND_AFZ = "round_afz"
    ROUND_HU = "round_hu"
    ROUND_HD = "round_hd"
    ROUND_HAFZ = "round_hafz"
    ROUND_HTZ = "round_htz"
    ROUND_EVEN = "round_even"
    ROUND_ODD = "round_odd"

    def __str__(self) -> str:
        return self.value


# Kinds whose discontinuities sit at half-integers.
NEAREST_KINDS = (
    IntFuncKind.ROUND_HU,
    IntFuncKind.ROUND_HD,
    IntFuncKind.ROUND_HAFZ,
    IntFuncKind.ROUND_HTZ,
    IntFuncKind.ROUND_EVEN,
    IntFuncKind.ROUND_ODD,
)

# Kinds whose discontinuities sit at integers.
STEP_KINDS = (
    IntFuncKind.FLOOR,
    IntFuncKind.CEIL,
    IntFuncKind.TRUNC,
    IntFuncKind.ROUND_AFZ,
)

# f(-x) == -f(x) for these; floor/ceil and half-up/half-down are not odd.
ODD_KINDS = (
    IntFuncKind.TRUNC,
    IntFuncKind.ROUND_AFZ,
    IntFuncKind.ROUND_HAFZ,
    IntFuncKind.ROUND_HTZ,
    IntFuncKind.ROUND_EVEN,
    IntFuncKind.ROUND_ODD,
)


def parse_kind(name) -> IntFuncKind:
    """Resolve a serialized kind name ("round_even", "floor", ...)."""
    if isinstance(name, IntFuncKind):
        return name
    try:
        return IntFuncKind(str(name).strip().lower())
    except ValueError:
        known = ", ".join(k.value for k in IntFuncKind)
        raise KeyError(f"Unknown integer function {name!r}; expected one of: {known}")


def is_tie_sensitive(kind: IntFuncKind) -> bool:
    return kind in NEAREST_KINDS


def _near_integer(x: float) -> Optional[int]:
    n = round(x)
    if abs(x - n) < TIE_TOLERANCE:
        return int(n)
    return None


def _tie_floor(x: float) -> Optional[int]:
    """Return k when x is within tolerance of k + 1/2, else None."""
    k = math.floor(x)
    for base in (k - 1, k):
        if abs(x - (base + 0.5)) < TIE_TOLERANCE:
            return int(base)
    return None


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _floor(x: float) -> int:
    n = _near_integer(x)
    return n if n is not None else math.floor(x)


def _ceil(x: float) -> int:
    n = _near_integer(x)
    return n if n is not None else math.ceil(x)


def _nearest(kind: IntFuncKind, x: float) -> int:
    k = _tie_floor(x)
    if k is None:
        return math.floor(x + 0.5)
    lower, upper = k, k + 1
    if kind is IntFuncKind.ROUND_HU:
        return upper
    if kind is IntFuncKind.ROUND_HD:
        return lower
    if kind is IntFuncKind.ROUND_HAFZ:
        return upper if x > 0 else lower
    if kind is IntFuncKind.ROUND_HTZ:
        return lower if x > 0 else upper
    # (2x - 1)/4 is an integer exactly when the tie sits above an even k
    even_base = k % 2 == 0
    if kind is IntFuncKind.ROUND_EVEN:
        return lower if even_base else upper
    if kind is IntFuncKind.ROUND_ODD:
        return upper if even_base else lower
    raise ValueError(f"Not a nearest-integer function: {kind}")


def apply(kind: IntFuncKind, x: float) -> int:
    """Map a real number to an integer with the given function.

    Args:
        kind: Which integer function to apply.
        x: Finite real argument.

    Returns:
        The integer image of x. Values within TIE_TOLERANCE of an integer
        (step kinds) or of a half-integer (nearest kinds) are treated as
        lying exactly on it.

    Raises:
        ValueError: If x is NaN or infinite.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"Integer functions need a finite argument, got {x!r}")
    kind = parse_kind(kind)

    if kind is IntFuncKind.FLOOR:
        return _floor(x)
    if kind is IntFuncKind.CEIL:
        return _ceil(x)
    if kind is IntFuncKind.TRUNC:
        return _sign(x) * _floor(abs(x))
    if kind is IntFuncKind.ROUND_AFZ:
        return _sign(x) * _ceil(abs(x))
    return _nearest(kind, x)


def apply_matrix(kind: IntFuncKind, matrix: np.ndarray) -> np.ndarray:
    """Entrywise apply(); returns an int64 array of the same shape."""
    arr = np.asarray(matrix, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("Integer functions need finite matrix entries")
    kind = parse_kind(kind)
    out = np.empty(arr.shape, dtype=np.int64)
    for idx, value in np.ndenumerate(arr):
        out[idx] = apply(kind, value)
    return out
