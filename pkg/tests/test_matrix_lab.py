"""
Tests for exact matrix algebra: gram, orthogonality, deviation from
diagonality, scaling diagonals and low-complexity inverses.

Run:  pytest tests/test_matrix_lab.py -v -s
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from dct_approx.catalog import (
    CONSTANTS,
    DELTA_TOLERANCE,
    EXPECTED_DELTAS,
    EXPECTED_GRAM_DIAGONALS,
    EXPECTED_INVERSE_DIAGONALS,
    ORTHOGONAL_NAMES,
    named_matrix,
)
from dct_approx.matrix_lab import (
    DELTA_THRESHOLD,
    SingularMatrixError,
    determinant,
    deviation_from_diagonality,
    entries_in_C,
    exact_inverse,
    extract_constants,
    factor_inverse_lowcomplexity,
    format_rational,
    gram,
    has_dct_symmetry,
    has_null_row,
    is_orthogonal,
    normalized_transform,
    orthonormalize,
    parse_rational,
    rational_identity,
    rational_matmul,
    row_scaling_between,
    structured_matrix,
    within_delta_threshold,
)

F = Fraction
I8 = np.eye(8, dtype=np.int64)


# ── Helpers ──────────────────────────────────────────────────────────────────

def _delta(name: str) -> float:
    return deviation_from_diagonality(gram(named_matrix(name)))


# ── Structure tests ─────────────────────────────────────────────────────────

class TestStructure:
    def test_t0_first_column(self):
        assert named_matrix("T0")[:, 0].tolist() == [1, 1, 1, 1, 1, 1, 0, 0]

    def test_sdct_is_sign_of_dct(self):
        from dct_approx.exact_dct import dct_matrix
        assert np.array_equal(named_matrix("SDCT"), np.sign(dct_matrix()).astype(np.int64))

    @pytest.mark.parametrize("name", sorted(CONSTANTS))
    def test_constants_round_trip(self, name):
        assert extract_constants(structured_matrix(CONSTANTS[name])) == CONSTANTS[name]

    @pytest.mark.parametrize("name", sorted(CONSTANTS))
    def test_dct_symmetry(self, name):
        assert has_dct_symmetry(named_matrix(name))

    def test_ceil_candidate_has_no_symmetry(self):
        t = named_matrix("T~0")
        assert not has_dct_symmetry(t)
        assert extract_constants(t) is None

    def test_wrong_constant_count(self):
        with pytest.raises(ValueError, match="7 constants"):
            structured_matrix((1, 1, 1))

    def test_entries_in_C(self):
        assert entries_in_C(named_matrix("T3"))
        assert entries_in_C(np.zeros((8, 8), dtype=int))
        bad = named_matrix("T3")
        bad[2, 2] = 4
        assert not entries_in_C(bad)

    def test_null_row(self):
        t = named_matrix("T0")
        assert not has_null_row(t)
        t[5] = 0
        assert has_null_row(t)


# ── Gram / orthogonality tests ──────────────────────────────────────────────

class TestOrthogonality:
    @pytest.mark.parametrize("name", ORTHOGONAL_NAMES)
    def test_orthogonal_set(self, name):
        t = named_matrix(name)
        assert is_orthogonal(t)
        assert tuple(int(v) for v in np.diag(gram(t))) == EXPECTED_GRAM_DIAGONALS[name]

    @pytest.mark.parametrize("name", ["T~1", "T~2", "T~3", "T~4", "T~0"])
    def test_non_orthogonal_set(self, name):
        assert not is_orthogonal(named_matrix(name))

    def test_identity(self):
        assert is_orthogonal(I8)

    def test_gram_is_exact_integer(self):
        g = gram(named_matrix("T7"))
        assert g.dtype == np.int64
        assert np.array_equal(g, g.T)


# ── Deviation tests ─────────────────────────────────────────────────────────

class TestDeviation:
    @pytest.mark.parametrize("name, expected", sorted(EXPECTED_DELTAS.items()))
    def test_reference_values(self, name, expected):
        assert _delta(name) == pytest.approx(expected, abs=DELTA_TOLERANCE)

    def test_diagonal_matrix_is_zero(self):
        assert deviation_from_diagonality(np.diag([3, 1, 4, 1, 5, 9, 2, 6])) == 0.0

    def test_scale_invariant(self):
        g = gram(named_matrix("T~3"))
        assert deviation_from_diagonality(7 * g) == pytest.approx(deviation_from_diagonality(g), abs=1e-15)

    def test_ordering(self):
        assert _delta("T~4") < _delta("T~3") < _delta("T~1") < _delta("T~2") < _delta("T~0")

    @pytest.mark.parametrize("name", ["T~1", "T~2", "T~3", "T~4"])
    def test_accepted_within_threshold(self, name):
        assert within_delta_threshold(gram(named_matrix(name)))
        assert _delta(name) <= DELTA_THRESHOLD + 1e-12

    def test_ceil_candidate_above_threshold(self):
        assert not within_delta_threshold(gram(named_matrix("T~0")))

    def test_zero_matrix(self):
        with pytest.raises(ValueError, match="zero matrix"):
            deviation_from_diagonality(np.zeros((8, 8), dtype=int))

    def test_threshold_test_is_exact_at_boundary(self):
        # diag^2 : total^2 == 4 : 5 sits exactly on the threshold
        m = np.array([[2, 1], [0, 0]])
        m2 = np.array([[2, 1], [1, 0]])
        assert within_delta_threshold(m)
        assert not within_delta_threshold(m2)
        assert deviation_from_diagonality(m) == pytest.approx(DELTA_THRESHOLD, abs=1e-15)


# ── Scaling tests ───────────────────────────────────────────────────────────

class TestScaling:
    def test_t0(self):
        d = orthonormalize(named_matrix("T0")).d
        expected = [1 / math.sqrt(v) for v in (8, 6, 4, 6, 8, 6, 4, 6)]
        assert np.allclose(d, expected)

    def test_t7_exact(self):
        assert orthonormalize(named_matrix("T7")).d_squared == tuple(
            F(1, v) for v in (32, 30, 20, 30, 32, 30, 20, 30)
        )

    def test_identity(self):
        assert np.allclose(orthonormalize(I8).as_array(), 1.0)

    def test_null_row(self):
        t = named_matrix("T0")
        t[3] = 0
        with pytest.raises(ValueError, match="degenerate"):
            orthonormalize(t)

    @pytest.mark.parametrize("name", ORTHOGONAL_NAMES)
    def test_orthogonal_normalized_is_orthonormal(self, name):
        c = normalized_transform(named_matrix(name))
        assert np.max(np.abs(c @ c.T - np.eye(8))) < 1e-12

    def test_near_orthogonal_rows_unit_norm(self):
        c = normalized_transform(named_matrix("T~3"))
        assert np.allclose(np.linalg.norm(c, axis=1), 1.0)

    def test_row_scaling_between_equivalent_pair(self):
        d = row_scaling_between(named_matrix("T~3"), named_matrix("T~4"))
        assert d is not None
        assert all(v >= 1 for v in d)
        assert np.array_equal(
            np.diag([int(v) for v in d]) @ named_matrix("T~3"), named_matrix("T~4")
        )

    def test_row_scaling_between_unrelated(self):
        assert row_scaling_between(named_matrix("T0"), named_matrix("T7")) is None


# ── Inverse tests ───────────────────────────────────────────────────────────

class TestInverse:
    def test_determinant_small(self):
        assert determinant([[2, 1], [1, 3]]) == 5
        assert determinant([[1, 2], [2, 4]]) == 0
        assert determinant([[0, 1], [1, 0]]) == -1

    @pytest.mark.parametrize("name", ["T~1", "T~2", "T~3", "T~4", "T3"])
    def test_exact_inverse(self, name):
        t = named_matrix(name)
        assert np.array_equal(rational_matmul(exact_inverse(t), t), rational_identity())

    def test_singular(self):
        t = named_matrix("T0")
        t[7] = t[0]
        with pytest.raises(SingularMatrixError):
            exact_inverse(t)

    @pytest.mark.parametrize("name", sorted(EXPECTED_INVERSE_DIAGONALS))
    def test_low_complexity_factorization(self, name):
        t = named_matrix(name)
        fac = factor_inverse_lowcomplexity(exact_inverse(t))
        assert fac is not None
        assert fac.diagonal == EXPECTED_INVERSE_DIAGONALS[name]
        assert entries_in_C(fac.factor)
        assert np.array_equal(rational_matmul(fac.to_rational(), t), rational_identity())

    def test_identity_factorization(self):
        fac = factor_inverse_lowcomplexity(exact_inverse(I8))
        assert np.array_equal(fac.factor, I8)
        assert fac.diagonal == tuple(F(1) for _ in range(8))

    def test_inverse_relation_between_equivalent_pair(self):
        t3, t4 = named_matrix("T~3"), named_matrix("T~4")
        d = row_scaling_between(t3, t4)
        d_inv = np.diag([1 / v for v in d]).astype(object)
        assert np.array_equal(exact_inverse(t4), rational_matmul(exact_inverse(t3), d_inv))

    def test_not_low_complexity(self):
        m = np.array([[1, 2, 0], [0, 1, 2], [0, 0, 1]])
        assert factor_inverse_lowcomplexity(exact_inverse(m)) is None

    def test_float_view(self):
        fac = factor_inverse_lowcomplexity(exact_inverse(named_matrix("T~2")))
        t = named_matrix("T~2").astype(float)
        assert np.allclose(fac.as_float_array() @ t, np.eye(8), atol=1e-12)


# ── Rational formatting tests ──────────────────────────────────────────────

class TestRationalText:
    @pytest.mark.parametrize("value, text", [
        (F(1, 28), "1/28"),
        (F(2, 4), "1/2"),
        (F(3), "3/1"),
        (F(-1, 8), "-1/8"),
    ])
    def test_format(self, value, text):
        assert format_rational(value) == text

    def test_parse(self):
        assert parse_rational("1/20") == F(1, 20)
        assert parse_rational("4") == F(4)
