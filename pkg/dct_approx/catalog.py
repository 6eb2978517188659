"""Named transforms, aliases and reference values.

Naming: ``T0``..``T7`` are orthogonal,
``T~0``..``T~4`` are not. Every named matrix except ``T~0`` is DCT-patterned
and is stored as its seven constants m0..m6.
"""

from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .matrix_lab import structured_matrix

# -- Names ----------------------------------------------------------------------
DCT_NAME = "DCT"
ORTHOGONAL_NAMES = ("T0", "T1", "T2", "T3", "T4", "T5", "T6", "T7")
NON_ORTHOGONAL_NAMES = ("T~1", "T~2", "T~3", "T~4")
REJECTED_NAMES = ("T~0",)
APPROXIMATION_NAMES = ORTHOGONAL_NAMES + NON_ORTHOGONAL_NAMES

ALIASES: Dict[str, str] = {
    "SDCT": "T~2",
    "RDCT": "T4",
    "T6-RF-IMAGING": "T6",
}
RECORD_ALIAS: Dict[str, str] = {
    "T~2": "SDCT",
    "T4": "RDCT",
    "T6": "T6-RF-imaging",
}

# -- Fast-algorithm constants m0..m6 ------------------------------------------------
# T1 is listed with the constants its alpha interval actually produces under
# truncation; the commonly quoted display swaps the m1/m5 slots (rows 2 and 6).
CONSTANTS: Dict[str, Tuple[int, ...]] = {
    "T0": (1, 1, 1, 1, 1, 0, 0),
    "T1": (2, 1, 1, 1, 1, 0, 0),
    "T2": (2, 2, 1, 1, 1, 0, 0),
    "T3": (3, 3, 2, 2, 2, 1, 0),
    "T4": (1, 1, 1, 1, 1, 1, 0),
    "T5": (2, 1, 1, 1, 1, 1, 0),
    "T6": (2, 2, 1, 1, 1, 1, 0),
    "T7": (3, 2, 2, 2, 1, 1, 1),
    "T~1": (1, 1, 1, 1, 0, 0, 0),
    "T~2": (1, 1, 1, 1, 1, 1, 1),
    "T~3": (2, 2, 2, 1, 1, 1, 1),
    "T~4": (2, 2, 2, 2, 1, 1, 1),
}

REFERENCE_T1_CONSTANTS = (2, 0, 1, 1, 1, 1, 0)

# Ceiling candidate; not DCT-patterned (negative slots map to 0).
T_TILDE_0 = np.array([
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 0, 0, 0, 1, 1],
    [1, 0, 0, 0, 1, 1, 1, 0],
    [1, 0, 0, 1, 1, 0, 0, 1],
    [1, 0, 1, 1, 0, 0, 1, 0],
    [1, 0, 1, 0, 0, 1, 0, 1],
    [1, 0, 1, 0, 1, 0, 1, 0],
], dtype=np.int64)

# -- Reference values -------------------------------------------------------------
EXPECTED_GRAM_DIAGONALS: Dict[str, Tuple[int, ...]] = {
    "T0": (8, 6, 4, 6, 8, 6, 4, 6),
    "T1": (8, 12, 4, 12, 8, 12, 4, 12),
    "T2": (8, 12, 16, 12, 8, 12, 16, 12),
    "T3": (32, 34, 40, 34, 32, 34, 40, 34),
    "T4": (8, 6, 8, 6, 8, 6, 8, 6),
    "T5": (8, 12, 8, 12, 8, 12, 8, 12),
    "T6": (8, 12, 20, 12, 8, 12, 20, 12),
    "T7": (32, 30, 20, 30, 32, 30, 20, 30),
}

EXPECTED_DELTAS: Dict[str, float] = {
    "T~0": 0.4548,
    "T~1": 0.0646,
    "T~2": 0.1056,
    "T~3": 0.0063,
    "T~4": 0.0036,
}
DELTA_TOLERANCE = 5e-5

_F = Fraction
EXPECTED_INVERSE_DIAGONALS: Dict[str, Tuple[Fraction, ...]] = {
    "T~1": (_F(1, 8), _F(1, 4), _F(1, 4), _F(1, 4), _F(1, 8), _F(1, 4), _F(1, 4), _F(1, 4)),
    "T~2": (_F(1, 8), _F(1, 4), _F(1, 8), _F(1, 4), _F(1, 8), _F(1, 4), _F(1, 8), _F(1, 4)),
    "T~3": (_F(1, 8), _F(1, 28), _F(1, 20), _F(1, 28), _F(1, 8), _F(1, 28), _F(1, 20), _F(1, 28)),
    "T~4": (_F(1, 16), _F(1, 28), _F(1, 20), _F(1, 28), _F(1, 16), _F(1, 28), _F(1, 20), _F(1, 28)),
}

# (multiplications, additions, shifts)
EXPECTED_COMPLEXITY: Dict[str, Tuple[int, int, int]] = {
    "T0": (0, 22, 0),
    "T1": (0, 22, 4),
    "T2": (0, 22, 6),
    "T3": (0, 30, 16),
    "T4": (0, 24, 0),
    "T5": (0, 24, 4),
    "T6": (0, 24, 6),
    "T7": (0, 32, 12),
    "T~1": (0, 18, 0),
    "T~2": (0, 28, 0),
    "T~3": (0, 28, 10),
    "T~4": (0, 28, 12),
}

# B -> (A, d) with B = diag(d) . A. Rows 2 and 6 of T1 are half those of T2,
# so both normalize to the same transform.
EXPECTED_EQUIVALENCES: Dict[str, Tuple[str, Tuple[int, ...]]] = {
    "T2": ("T1", (1, 1, 2, 1, 1, 1, 2, 1)),
    "T~4": ("T~3", (2, 1, 1, 1, 2, 1, 1, 1)),
}


def named_matrix(name: str) -> np.ndarray:
    """Integer matrix of a named approximation (aliases accepted)."""
    canonical = resolve_name(name)
    if canonical == DCT_NAME:
        raise KeyError("The exact DCT has no integer matrix")
    if canonical == "T~0":
        return T_TILDE_0.copy()
    return structured_matrix(CONSTANTS[canonical])


def known_matrices() -> Dict[str, np.ndarray]:
    names = APPROXIMATION_NAMES + REJECTED_NAMES
    return {name: named_matrix(name) for name in names}


def name_for_matrix(matrix: np.ndarray) -> Optional[str]:
    arr = np.asarray(matrix)
    for name, known in known_matrices().items():
        if np.array_equal(arr, known):
            return name
    return None


def resolve_name(name: str) -> str:
    """Canonical transform name for a CLI selector.

    Accepts canonical names ("T3", "T~2"), aliases ("SDCT", "RDCT"),
    "Tt2" as a shell-friendly spelling of "T~2", and "DCT".

    Raises:
        KeyError: If the name is unknown.
    """
    key = str(name).strip().upper().replace("̃", "~")
    if key in ALIASES:
        return ALIASES[key]
    if key == DCT_NAME:
        return DCT_NAME
    if key.startswith("TT") and key[2:].isdigit():
        key = "T~" + key[2:]
    if key in CONSTANTS or key in REJECTED_NAMES:
        return key
    known = ", ".join((DCT_NAME,) + APPROXIMATION_NAMES + REJECTED_NAMES + tuple(sorted(ALIASES)))
    raise KeyError(f"Unknown transform {name!r}; known names: {known}")
