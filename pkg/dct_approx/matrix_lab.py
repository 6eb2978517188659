"""Exact integer/rational matrix algebra for candidate transforms.

Integer matrices are int64 numpy arrays; rational matrices are numpy object
arrays of ``fractions.Fraction``. Every decision that classifies a
candidate (orthogonality, the deviation threshold, invertibility, inverse
complexity) is made in exact arithmetic.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exact_dct import N

# -- Entry set C ----------------------------------------------------------------
ENTRY_SET = frozenset({0, 1, -1, 2, -2, 3, -3})
MAX_ENTRY = 3

# -- Deviation from diagonality -------------------------------------------------
# delta <= 1 - 2/sqrt(5)  <=>  5 * ||diag M||_F^2 >= 4 * ||M||_F^2
DELTA_THRESHOLD = 1.0 - 2.0 / math.sqrt(5.0)
DELTA_NUM, DELTA_DEN = 5, 4

IntMatrix8 = np.ndarray
RationalMatrix8 = np.ndarray


class SingularMatrixError(ZeroDivisionError):
    """Raised when an integer matrix has exact determinant zero."""


@dataclass(frozen=True)
class ScalingDiagonal:
    """S = sqrt(diag(T.T^T)^-1), kept exactly as d^2 = 1/D_ii."""
    d_squared: Tuple[Fraction, ...]

    @property
    def d(self) -> Tuple[float, ...]:
        return tuple(math.sqrt(v.numerator / v.denominator) for v in self.d_squared)

    def as_array(self) -> np.ndarray:
        return np.array(self.d, dtype=np.float64)


@dataclass(frozen=True)
class InverseFactorization:
    """T^-1 = E . diag(delta) with E an integer matrix."""
    factor: np.ndarray
    diagonal: Tuple[Fraction, ...]

    def to_rational(self) -> RationalMatrix8:
        out = np.empty(self.factor.shape, dtype=object)
        for (i, j), value in np.ndenumerate(self.factor):
            out[i, j] = Fraction(int(value)) * self.diagonal[j]
        return out

    def as_float_array(self) -> np.ndarray:
        scale = np.array([float(v) for v in self.diagonal])
        return self.factor.astype(np.float64) * scale[np.newaxis, :]


# -- Construction & predicates --------------------------------------------------

def as_int_matrix(matrix, size: int = N) -> IntMatrix8:
    """Validate and copy an integer-valued square matrix into int64."""
    arr = np.asarray(matrix)
    if arr.shape != (size, size):
        raise ValueError(f"Expected a {size}x{size} matrix, got shape {arr.shape}")
    if arr.dtype == object or np.issubdtype(arr.dtype, np.floating):
        as_float = arr.astype(np.float64)
        if not np.all(np.isfinite(as_float)) or not np.all(as_float == np.round(as_float)):
            raise ValueError("Matrix entries must be integers")
    return arr.astype(np.int64)


def identity_int(size: int = N) -> IntMatrix8:
    return np.eye(size, dtype=np.int64)


def entries_in_C(T: IntMatrix8) -> bool:
    """True iff every entry lies in {0, +-1, +-2, +-3}."""
    return bool(np.all(np.abs(as_int_matrix(T, len(T))) <= MAX_ENTRY))


def has_null_row(T: IntMatrix8) -> bool:
    return bool(np.any(np.all(np.asarray(T) == 0, axis=1)))


def has_dct_symmetry(T: IntMatrix8) -> bool:
    """Even rows symmetric and odd rows antisymmetric about the midpoint."""
    arr = np.asarray(T)
    mirrored = arr[:, ::-1]
    even = np.all(arr[0::2] == mirrored[0::2])
    odd = np.all(arr[1::2] == -mirrored[1::2])
    return bool(even and odd)


def structured_matrix(m: Sequence[int]) -> IntMatrix8:
    """Build the DCT-patterned matrix whose gamma_k slots hold m[k].

    Row halves follow the sign pattern of the exact DCT; even rows are
    mirrored, odd rows mirrored with a sign flip.
    """
    if len(m) != 7:
        raise ValueError(f"Expected 7 constants m0..m6, got {len(m)}")
    m0, m1, m2, m3, m4, m5, m6 = (int(v) for v in m)
    halves = [
        (m3, m3, m3, m3),
        (m0, m2, m4, m6),
        (m1, m5, -m5, -m1),
        (m2, -m6, -m0, -m4),
        (m3, -m3, -m3, m3),
        (m4, -m0, m6, m2),
        (m5, -m1, m1, -m5),
        (m6, -m4, m2, -m0),
    ]
    rows = []
    for index, half in enumerate(halves):
        sign = 1 if index % 2 == 0 else -1
        rows.append(list(half) + [sign * v for v in reversed(half)])
    return np.array(rows, dtype=np.int64)


def extract_constants(T: IntMatrix8) -> Optional[Tuple[int, ...]]:
    """Read m0..m6 off a matrix; None unless it is DCT-patterned."""
    arr = as_int_matrix(T)
    m = (
        int(arr[1, 0]), int(arr[2, 0]), int(arr[1, 1]), int(arr[0, 0]),
        int(arr[1, 2]), int(arr[2, 1]), int(arr[1, 3]),
    )
    if not np.array_equal(structured_matrix(m), arr):
        return None
    return m


def gram(T: IntMatrix8) -> IntMatrix8:
    """T . T^T in exact integer arithmetic."""
    arr = as_int_matrix(T, len(T))
    return arr @ arr.T


def is_orthogonal(T: IntMatrix8) -> bool:
    """True iff T . T^T is exactly diagonal."""
    m = gram(T)
    return bool(np.all(m == np.diag(np.diag(m))))


def _frobenius_squares(M: np.ndarray) -> Tuple[int, int]:
    arr = as_int_matrix(M, len(M))
    values = [int(v) for v in arr.ravel()]
    total = sum(v * v for v in values)
    diag = sum(int(arr[i, i]) ** 2 for i in range(len(arr)))
    return diag, total


def deviation_from_diagonality(M: IntMatrix8) -> float:
    """delta(M) = 1 - ||diag(M)||_F / ||M||_F.

    Raises:
        ValueError: If M is the zero matrix.
    """
    diag, total = _frobenius_squares(M)
    if total == 0:
        raise ValueError("Deviation from diagonality is undefined for the zero matrix")
    return 1.0 - math.sqrt(diag / total)


def within_delta_threshold(M: IntMatrix8) -> bool:
    """Exact test of delta(M) <= 1 - 2/sqrt(5)."""
    diag, total = _frobenius_squares(M)
    if total == 0:
        raise ValueError("Deviation from diagonality is undefined for the zero matrix")
    return DELTA_NUM * diag >= DELTA_DEN * total


def orthonormalize(T: IntMatrix8) -> ScalingDiagonal:
    """Diagonal factor S (orthogonal T) or S-hat (near-orthogonal T).

    Raises:
        ValueError: If any diagonal entry of T.T^T is zero (null row).
    """
    diag = np.diag(gram(T))
    if np.any(diag == 0):
        zero_rows = [int(i) for i in np.flatnonzero(diag == 0)]
        raise ValueError(f"Cannot orthonormalize a degenerate matrix: null rows {zero_rows}")
    return ScalingDiagonal(d_squared=tuple(Fraction(1, int(v)) for v in diag))


def normalized_transform(T: IntMatrix8) -> np.ndarray:
    """S-hat . T as a float matrix."""
    scaling = orthonormalize(T)
    return scaling.as_array()[:, np.newaxis] * np.asarray(T, dtype=np.float64)


def row_scaling_between(A: IntMatrix8, B: IntMatrix8) -> Optional[Tuple[Fraction, ...]]:
    """Find positive D with B = D . A, row by row; None when none exists."""
    a = as_int_matrix(A, len(A))
    b = as_int_matrix(B, len(B))
    factors: List[Fraction] = []
    for row_a, row_b in zip(a, b):
        nz = np.flatnonzero(row_a)
        if len(nz) == 0:
            return None
        ratio = Fraction(int(row_b[nz[0]]), int(row_a[nz[0]]))
        if ratio <= 0:
            return None
        if any(Fraction(int(y)) != ratio * int(x) for x, y in zip(row_a, row_b)):
            return None
        factors.append(ratio)
    return tuple(factors)


# -- Exact determinant & inverse ------------------------------------------------

def determinant(T: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant (fraction-free Bareiss elimination)."""
    rows = [[int(v) for v in row] for row in T]
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if rows[i][k] != 0), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * pivot - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = pivot
    return sign * rows[n - 1][n - 1]


def _minor(rows: List[List[int]], skip_row: int, skip_col: int) -> List[List[int]]:
    return [
        [v for j, v in enumerate(row) if j != skip_col]
        for i, row in enumerate(rows) if i != skip_row
    ]


def exact_inverse(T: IntMatrix8) -> RationalMatrix8:
    """T^-1 as exact rationals, computed as adj(T) / det(T).

    Raises:
        SingularMatrixError: If det(T) == 0.
    """
    arr = as_int_matrix(T, len(T))
    rows = [[int(v) for v in row] for row in arr]
    det = determinant(rows)
    if det == 0:
        raise SingularMatrixError("Matrix is singular (exact determinant is zero)")
    n = len(rows)
    inverse = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            cofactor = (-1) ** (i + j) * determinant(_minor(rows, i, j))
            inverse[j, i] = Fraction(cofactor, det)
    return inverse


def rational_identity(size: int = N) -> RationalMatrix8:
    return np.array([[Fraction(int(i == j)) for j in range(size)] for i in range(size)], dtype=object)


def rational_matmul(A: np.ndarray, B: np.ndarray) -> RationalMatrix8:
    """Exact product of two matrices holding ints or Fractions."""
    a = np.asarray(A, dtype=object)
    b = np.asarray(B, dtype=object)
    out = np.empty((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum((Fraction(a[i, k]) * Fraction(b[k, j]) for k in range(a.shape[1])), Fraction(0))
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def factor_inverse_lowcomplexity(Tinv: RationalMatrix8) -> Optional[InverseFactorization]:
    """Split T^-1 into E . diag(delta), column by column.

    Each column contributes delta_j = gcd(numerators) / lcm(denominators), so
    column j of E is the primitive integer vector along column j of T^-1.

    Returns:
        The factorization when every entry of E lies in C, otherwise None.
    """
    inv = np.asarray(Tinv, dtype=object)
    n_rows, n_cols = inv.shape
    factor = np.zeros((n_rows, n_cols), dtype=np.int64)
    diagonal: List[Fraction] = []
    for j in range(n_cols):
        column = [Fraction(inv[i, j]) for i in range(n_rows)]
        nonzero = [v for v in column if v != 0]
        if not nonzero:
            raise SingularMatrixError(f"Column {j} of the inverse is zero")
        denom = reduce(_lcm, (v.denominator for v in nonzero), 1)
        numer = reduce(math.gcd, (abs(v.numerator) * (denom // v.denominator) for v in nonzero))
        scale = Fraction(numer, denom)
        entries = [v / scale for v in column]
        if any(e.denominator != 1 or abs(e.numerator) > MAX_ENTRY for e in entries):
            return None
        factor[:, j] = [e.numerator for e in entries]
        diagonal.append(scale)
    return InverseFactorization(factor=factor, diagonal=tuple(diagonal))


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q" in lowest terms."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(str(text))
