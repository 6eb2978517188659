"""Exact 8-point DCT matrix, gamma constants and reference 2-D transforms.

Everything downstream measures itself against these float64 values; the
integer approximations never feed back into them.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

# -- Dimensions ---------------------------------------------------------------
N = 8
NUM_GAMMAS = 7


def _gamma(k: int) -> float:
    return math.cos(2.0 * math.pi * (k + 1) / 32.0)


# -- Gamma constants ------------------------------------------------------------
# gamma_k = cos(2*pi*(k+1)/32); every nonzero entry of the DCT is +-gamma_k / 2.
GAMMA: Tuple[float, ...] = tuple(_gamma(k) for k in range(NUM_GAMMAS))


@dataclass(frozen=True)
class GammaConstants:
    """The seven distinct magnitudes (times 2) found in the 8-point DCT."""
    gamma: Tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        return self.gamma[k]

    def __len__(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class ExactDct:
    """Orthonormal 8x8 DCT-II matrix, read-only."""
    matrix: np.ndarray

    @property
    def T(self) -> np.ndarray:
        return self.matrix.T


def build_gamma_constants() -> GammaConstants:
    return GammaConstants(gamma=GAMMA)


def build_exact_dct() -> ExactDct:
    """Build C with c[m][n] = (1/sqrt(8)) * beta_m * cos(pi*m*(2n+1)/16).

    Indices here are 0-based; beta_0 = 1 and beta_m = sqrt(2) otherwise.

    Returns:
        ExactDct wrapping a non-writeable float64 array.
    """
    m = np.arange(N).reshape(-1, 1)
    n = np.arange(N).reshape(1, -1)
    beta = np.where(m == 0, 1.0, math.sqrt(2.0))
    matrix = beta / math.sqrt(N) * np.cos(np.pi * m * (2 * n + 1) / (2 * N))
    matrix.setflags(write=False)
    return ExactDct(matrix=matrix)


_DCT = build_exact_dct()


def dct_matrix() -> np.ndarray:
    """Shared read-only copy of C."""
    return _DCT.matrix


def _check_block(block: np.ndarray, label: str) -> np.ndarray:
    arr = np.asarray(block, dtype=np.float64)
    if arr.shape != (N, N):
        raise ValueError(f"{label} must be {N}x{N}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{label} contains non-finite values")
    return arr


def dct_2d(block: np.ndarray) -> np.ndarray:
    """Forward 2-D DCT: C . block . C^T."""
    arr = _check_block(block, "block")
    c = _DCT.matrix
    return c @ arr @ c.T


def idct_2d(coeffs: np.ndarray) -> np.ndarray:
    """Inverse 2-D DCT: C^T . coeffs . C."""
    arr = _check_block(coeffs, "coeffs")
    c = _DCT.matrix
    return c.T @ arr @ c
