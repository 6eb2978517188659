"""
Tests for the expansion-factor sweep, candidate classification and the
merged catalog of approximations.

Run:  pytest tests/test_search.py -v -s
"""

import sys
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from dct_approx.catalog import (
    APPROXIMATION_NAMES,
    DCT_NAME,
    CONSTANTS,
    DELTA_TOLERANCE,
    EXPECTED_DELTAS,
    EXPECTED_EQUIVALENCES,
    NON_ORTHOGONAL_NAMES,
    ORTHOGONAL_NAMES,
    REFERENCE_T1_CONSTANTS,
    named_matrix,
)
from dct_approx.integer_functions import IntFuncKind
from dct_approx.exact_dct import GAMMA
from dct_approx.matrix_lab import (
    extract_constants,
    normalized_transform,
    row_scaling_between,
    structured_matrix,
)
from dct_approx.search import (
    AlphaInterval,
    AlphaPoint,
    Classification,
    _merge,
    _pieces,
    alpha_range,
    breakpoints,
    classify,
    evaluate,
    find_record,
    full_catalog,
    make_record,
    summarize,
    sweep,
)

K = IntFuncKind
EPS = 1e-7


# ── Helpers ──────────────────────────────────────────────────────────────────

@pytest.fixture(scope="module")
def catalog():
    return full_catalog()


def _by_name(records):
    return {r.name: r for r in records}


def _interval(lo: str, hi: str, lo_closed: bool, hi_closed: bool) -> AlphaInterval:
    return AlphaInterval(AlphaPoint.parse(lo), AlphaPoint.parse(hi), lo_closed, hi_closed)


# ── Alpha point / interval tests ────────────────────────────────────────────

class TestAlphaTypes:
    def test_symbols(self):
        p = AlphaPoint(3, 4)
        assert p.symbol() == "3/γ4"
        assert p.symbol(unicode=False) == "3/g4"
        assert AlphaPoint(0, None).symbol() == "0"

    @pytest.mark.parametrize("text", ["2/g4", "2/γ4", " 2/g4 "])
    def test_parse(self, text):
        assert AlphaPoint.parse(text) == AlphaPoint(2, 4)

    def test_parse_plain_number(self):
        assert AlphaPoint.parse("0") == AlphaPoint(0, None)
        assert AlphaPoint.parse("0").value == 0.0

    def test_contains(self):
        iv = _interval("1/g5", "3/g0", True, False)
        assert iv.contains(AlphaPoint(1, 5).value)
        assert not iv.contains(AlphaPoint(3, 0).value)
        assert iv.contains(3.0)
        assert not iv.contains(1.0)

    def test_describe(self):
        assert _interval("2/g3", "2/g4", False, True).describe() == "(2/γ3, 2/γ4]"
        point = _interval("2/g3", "2/g3", True, True)
        assert point.is_point
        assert point.describe(unicode=False) == "2/g3"

    def test_sample_strictly_inside(self):
        iv = _interval("2/g3", "2/g4", False, False)
        rng = np.random.default_rng(0)
        for a in iv.sample(rng, 50):
            assert iv.lo.value < a < iv.hi.value


# ── Range & breakpoint tests ────────────────────────────────────────────────

class TestRanges:
    @pytest.mark.parametrize("kind, lo, hi", [
        pytest.param(K.FLOOR, "2/g0", "8/g0", id="floor"),
        pytest.param(K.TRUNC, "2/g0", "8/g0", id="trunc"),
        pytest.param(K.CEIL, "0", "6/g0", id="ceil"),
        pytest.param(K.ROUND_AFZ, "0", "6/g0", id="afz"),
        pytest.param(K.ROUND_EVEN, "1/g0", "7/g0", id="even"),
        pytest.param(K.ROUND_HU, "1/g0", "7/g0", id="hu"),
    ])
    def test_alpha_range(self, kind, lo, hi):
        rng = alpha_range(kind)
        assert rng.lo == AlphaPoint.parse(lo)
        assert rng.hi == AlphaPoint.parse(hi)

    @pytest.mark.parametrize("kind", list(IntFuncKind), ids=lambda k: k.value)
    def test_breakpoints_sorted_inside_range(self, kind):
        points = breakpoints(kind)
        values = [p.value for p in points]
        rng = alpha_range(kind)
        assert values == sorted(values)
        assert len(set(values)) == len(values)
        assert all(rng.lo.value - 1e-9 <= v <= rng.hi.value + 1e-9 for v in values)

    def test_step_breakpoints_use_even_numerators(self):
        assert all(p.numerator % 2 == 0 for p in breakpoints(K.TRUNC))
        assert AlphaPoint(2, 4) in breakpoints(K.TRUNC)

    def test_nearest_breakpoints_use_odd_numerators(self):
        points = breakpoints(K.ROUND_HAFZ)
        assert all(p.numerator % 2 == 1 for p in points)
        for p in ("3/g0", "3/g1", "3/g2", "1/g5", "1/g6"):
            assert AlphaPoint.parse(p) in points

    @pytest.mark.parametrize("kind", list(IntFuncKind), ids=lambda k: k.value)
    def test_runs_tile_the_range(self, kind):
        runs = _merge(_pieces(kind))
        rng = alpha_range(kind)
        assert runs[0].lo == rng.lo
        assert runs[-1].hi == rng.hi
        for left, right in zip(runs, runs[1:]):
            assert left.hi == right.lo
            assert left.hi_closed != right.lo_closed
            assert not np.array_equal(left.matrix, right.matrix)

    def test_evaluate_matches_known_alpha(self):
        assert np.array_equal(evaluate(K.ROUND_HAFZ, 2.8), named_matrix("T4"))

    def test_evaluate_outside_rdct_interval(self):
        # 3.6742 lies past 3/g0, where HAFZ has moved on from T4
        assert 3.6742 > 3 / GAMMA[0]
        assert not np.array_equal(evaluate(K.ROUND_HAFZ, 3.6742), named_matrix("T4"))


# ── Classification tests ────────────────────────────────────────────────────

class TestClassify:
    @pytest.mark.parametrize("name", ORTHOGONAL_NAMES)
    def test_orthogonal(self, name):
        v = classify(named_matrix(name))
        assert v.classification is Classification.ORTHOGONAL
        assert v.delta == 0.0
        assert v.scaling is not None
        assert v.inverse_factorization is None

    @pytest.mark.parametrize("name", NON_ORTHOGONAL_NAMES)
    def test_near_orthogonal(self, name):
        v = classify(named_matrix(name))
        assert v.classification is Classification.NEAR_ORTHOGONAL
        assert v.delta == pytest.approx(EXPECTED_DELTAS[name], abs=DELTA_TOLERANCE)
        assert v.inverse_factorization is not None

    def test_ceil_candidate_rejected(self):
        v = classify(named_matrix("T~0"))
        assert v.classification is Classification.REJECTED
        assert v.delta == pytest.approx(EXPECTED_DELTAS["T~0"], abs=DELTA_TOLERANCE)
        assert "threshold" in v.reason

    def test_entries_outside_C(self):
        t = named_matrix("T3") * 2
        v = classify(t)
        assert v.classification is Classification.REJECTED
        assert v.reason == "entries outside C"

    def test_zero_matrix_is_degenerate(self):
        v = classify(np.zeros((8, 8), dtype=np.int64))
        assert v.classification is Classification.DEGENERATE
        assert v.delta is None

    def test_null_row_is_degenerate(self):
        t = named_matrix("T0")
        t[6] = 0
        assert classify(t).classification is Classification.DEGENERATE

    def test_identity(self):
        assert classify(np.eye(8, dtype=np.int64)).classification is Classification.ORTHOGONAL

    def test_make_record_names_known_matrices(self):
        record = make_record(named_matrix("T~2"), None, None)
        assert record.name == "T~2"
        assert record.known_alias == "SDCT"
        assert record.is_accepted


# ── Sweep tests ─────────────────────────────────────────────────────────────

class TestSweep:
    @pytest.mark.parametrize("kind, name, lo, hi, lo_closed, hi_closed", [
        pytest.param(K.TRUNC, "T0", "2/g4", "4/g0", True, False, id="trunc-T0"),
        pytest.param(K.TRUNC, "T1", "4/g0", "4/g1", True, False, id="trunc-T1"),
        pytest.param(K.TRUNC, "T2", "4/g1", "4/g2", True, False, id="trunc-T2"),
        pytest.param(K.TRUNC, "T3", "4/g4", "6/g2", True, False, id="trunc-T3"),
        pytest.param(K.TRUNC, "T~1", "2/g3", "2/g4", True, False, id="trunc-Tt1"),
        pytest.param(K.ROUND_HAFZ, "T0", "1/g4", "1/g5", True, False, id="hafz-T0"),
        pytest.param(K.ROUND_HAFZ, "T4", "1/g5", "3/g0", True, False, id="hafz-T4"),
        pytest.param(K.ROUND_HAFZ, "T5", "3/g0", "3/g1", True, False, id="hafz-T5"),
        pytest.param(K.ROUND_HAFZ, "T6", "3/g1", "3/g2", True, False, id="hafz-T6"),
        pytest.param(K.ROUND_HAFZ, "T7", "1/g6", "3/g4", True, False, id="hafz-T7"),
        pytest.param(K.ROUND_HTZ, "T4", "1/g5", "3/g0", False, True, id="htz-T4"),
        pytest.param(K.ROUND_HU, "T4", "1/g5", "3/g0", False, False, id="hu-T4"),
        pytest.param(K.ROUND_AFZ, "T~2", "0", "2/g0", False, True, id="afz-Tt2"),
        pytest.param(K.ROUND_AFZ, "T~3", "2/g2", "2/g3", False, True, id="afz-Tt3"),
        pytest.param(K.ROUND_AFZ, "T~4", "2/g3", "2/g4", False, True, id="afz-Tt4"),
        pytest.param(K.CEIL, "T~0", "0", "2/g0", False, False, id="ceil-Tt0"),
    ])
    def test_intervals(self, kind, name, lo, hi, lo_closed, hi_closed):
        records = [r for r in sweep(kind) if r.name == name]
        assert len(records) == 1
        assert records[0].alpha == _interval(lo, hi, lo_closed, hi_closed)
        assert records[0].source_function is kind

    def test_trunc_accepted_set(self):
        accepted = {r.name for r in sweep(K.TRUNC) if r.is_accepted}
        assert accepted == {"T0", "T1", "T2", "T3", "T~1"}

    def test_trunc_t1_constants(self):
        t1 = find_record(sweep(K.TRUNC), "T1")
        assert extract_constants(t1.matrix) == CONSTANTS["T1"]
        assert not np.array_equal(t1.matrix, structured_matrix(REFERENCE_T1_CONSTANTS))

    def test_reference_t1_swaps_m1_and_m5(self):
        swapped = list(CONSTANTS["T1"])
        swapped[1], swapped[5] = swapped[5], swapped[1]
        assert tuple(swapped) == REFERENCE_T1_CONSTANTS
        # the swapped form is never produced by any integer function
        reference = structured_matrix(REFERENCE_T1_CONSTANTS)
        for kind in IntFuncKind:
            assert not any(np.array_equal(r.matrix, reference) for r in sweep(kind))

    def test_floor_only_degenerate(self):
        records = sweep(K.FLOOR)
        assert not any(r.is_accepted for r in records)
        degenerate = [r for r in records if r.classification is Classification.DEGENERATE]
        assert sum(1 for r in degenerate if not r.alpha.is_point) == 3

    def test_ceil_keeps_only_named_rejection(self):
        records = sweep(K.CEIL)
        assert [r.name for r in records] == ["T~0"]
        assert records[0].classification is Classification.REJECTED

    def test_unnamed_records_have_compact_names(self):
        for record in sweep(K.FLOOR):
            assert record.name.startswith("floor:")
            assert " " not in record.name


# ── Merged catalog tests ────────────────────────────────────────────────────

class TestFullCatalog:
    def test_dct_first(self, catalog):
        assert catalog[0].name == DCT_NAME
        assert catalog[0].is_exact
        assert catalog[0].matrix is None

    def test_accepted_set(self, catalog):
        accepted = [r.name for r in catalog if r.is_accepted]
        assert sorted(accepted) == sorted(APPROXIMATION_NAMES)
        assert accepted == list(APPROXIMATION_NAMES)

    def test_counts(self, catalog):
        counts = summarize(catalog)
        assert counts["orthogonal"] == 8
        assert counts["near_orthogonal"] == 4
        assert counts["exact"] == 1
        assert counts["rejected"] == 1

    def test_one_record_per_matrix(self, catalog):
        keys = [r.matrix.tobytes() for r in catalog if r.matrix is not None]
        assert len(keys) == len(set(keys))

    def test_rdct_provenance(self, catalog):
        t4 = _by_name(catalog)["T4"]
        assert t4.known_alias == "RDCT"
        functions = {p.function for p in t4.provenance}
        assert {K.ROUND_HU, K.ROUND_HAFZ, K.ROUND_HTZ} <= functions
        hu = [p.interval for p in t4.provenance if p.function is K.ROUND_HU]
        assert _interval("1/g5", "3/g0", False, False) in hu

    def test_equivalence(self, catalog):
        linked = {r.name: r.equivalent_to for r in catalog if r.equivalent_to}
        assert linked == {name: target for name, (target, _) in EXPECTED_EQUIVALENCES.items()}

    @pytest.mark.parametrize("name", list(EXPECTED_EQUIVALENCES))
    def test_equivalent_pairs_normalize_alike(self, catalog, name):
        records = _by_name(catalog)
        target, factors = EXPECTED_EQUIVALENCES[name]
        a, b = records[target].matrix, records[name].matrix
        assert row_scaling_between(a, b) == factors
        assert np.allclose(normalized_transform(a), normalized_transform(b), atol=1e-12)

    def test_t1_is_not_linked_to_t2(self, catalog):
        # T1 = diag(1,1,1/2,...) . T2 has fractional factors
        assert _by_name(catalog)["T1"].equivalent_to is None

    def test_delta_ordering(self, catalog):
        records = _by_name(catalog)
        deltas = [records[n].delta for n in ("T~4", "T~3", "T~1", "T~2")]
        assert deltas == sorted(deltas)
        assert all(records[n].delta == 0.0 for n in ORTHOGONAL_NAMES)

    def test_threads_match_serial(self, catalog):
        assert full_catalog(jobs=4) == catalog

    def test_intervals_reproduce_matrix(self, catalog):
        rng = np.random.default_rng(1234)
        for record in catalog:
            for prov in record.provenance:
                for alpha in prov.interval.sample(rng, 5):
                    assert np.array_equal(evaluate(prov.function, alpha), record.matrix), (
                        record.name, prov.describe(),
                    )

    def test_intervals_are_maximal(self, catalog):
        for record in catalog:
            for prov in record.provenance:
                iv, rng = prov.interval, alpha_range(prov.function)
                if iv.lo_closed:
                    assert np.array_equal(evaluate(prov.function, iv.lo.value), record.matrix)
                if iv.hi_closed:
                    assert np.array_equal(evaluate(prov.function, iv.hi.value), record.matrix)
                if iv.lo.value > rng.lo.value:
                    outside = evaluate(prov.function, iv.lo.value - EPS)
                    assert not np.array_equal(outside, record.matrix), (record.name, prov.describe())
                if iv.hi.value < rng.hi.value:
                    outside = evaluate(prov.function, iv.hi.value + EPS)
                    assert not np.array_equal(outside, record.matrix), (record.name, prov.describe())

    def test_restricted_kinds(self):
        records = full_catalog([K.ROUND_AFZ])
        accepted = {r.name for r in records if r.is_accepted}
        assert {"T~2", "T~3", "T~4"} <= accepted
