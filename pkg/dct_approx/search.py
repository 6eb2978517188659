"""Expansion-factor sweep: enumerate every distinct int(alpha * C).

int(alpha * C) is piecewise constant in alpha and can only change where some
entry alpha * gamma_k / 2 crosses a discontinuity of the integer function.
The sweep therefore evaluates one representative per open interval between
consecutive breakpoints plus every breakpoint itself, merges neighbours
that produce the same matrix, and classifies the result.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import (
    APPROXIMATION_NAMES,
    DCT_NAME,
    RECORD_ALIAS,
    REJECTED_NAMES,
    name_for_matrix,
)
from .exact_dct import GAMMA, dct_matrix
from .integer_functions import (
    NEAREST_KINDS,
    TIE_TOLERANCE,
    IntFuncKind,
    apply_matrix,
    parse_kind,
)
from .matrix_lab import (
    InverseFactorization,
    ScalingDiagonal,
    SingularMatrixError,
    deviation_from_diagonality,
    entries_in_C,
    exact_inverse,
    factor_inverse_lowcomplexity,
    gram,
    has_dct_symmetry,
    has_null_row,
    is_orthogonal,
    orthonormalize,
    row_scaling_between,
    within_delta_threshold,
)

# -- Alpha ranges ---------------------------------------------------------------
# (lower numerator, upper numerator) over gamma_0, from 0 <= int(alpha*gamma_0/2) <= 3
_RANGE_NUMERATORS = {
    IntFuncKind.CEIL: (0, 6),
    IntFuncKind.ROUND_AFZ: (0, 6),
    IntFuncKind.FLOOR: (2, 8),
    IntFuncKind.TRUNC: (2, 8),
}
_NEAREST_RANGE_NUMERATORS = (1, 7)

MERGE_TOLERANCE = TIE_TOLERANCE


class Classification(str, Enum):
    ORTHOGONAL = "orthogonal"
    NEAR_ORTHOGONAL = "near_orthogonal"
    DEGENERATE = "degenerate"
    REJECTED = "rejected"
    EXACT = "exact"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AlphaPoint:
    """An expansion factor written as numerator / gamma_k (k=None: plain number)."""
    numerator: int
    k: Optional[int] = 0

    @property
    def value(self) -> float:
        if self.k is None:
            return float(self.numerator)
        return self.numerator / GAMMA[self.k]

    def symbol(self, unicode: bool = True) -> str:
        if self.k is None:
            return str(self.numerator)
        gamma = "γ" if unicode else "g"
        return f"{self.numerator}/{gamma}{self.k}"

    @classmethod
    def parse(cls, text: str) -> "AlphaPoint":
        text = text.strip()
        if "/" not in text:
            return cls(int(text), None)
        numerator, gamma = text.split("/", 1)
        return cls(int(numerator), int(gamma.lstrip("γg")))

    def __str__(self) -> str:
        return self.symbol()


@dataclass(frozen=True)
class AlphaInterval:
    lo: AlphaPoint
    hi: AlphaPoint
    lo_closed: bool
    hi_closed: bool

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, alpha: float) -> bool:
        lo, hi = self.lo.value, self.hi.value
        above = alpha > lo or (self.lo_closed and abs(alpha - lo) < MERGE_TOLERANCE)
        below = alpha < hi or (self.hi_closed and abs(alpha - hi) < MERGE_TOLERANCE)
        return above and below

    def sample(self, rng: np.random.Generator, count: int) -> List[float]:
        """Random alphas strictly inside the interval (the point itself for points)."""
        if self.is_point:
            return [self.lo.value] * count
        lo, hi = self.lo.value, self.hi.value
        margin = (hi - lo) * 1e-6
        return [float(v) for v in rng.uniform(lo + margin, hi - margin, size=count)]

    def describe(self, unicode: bool = True) -> str:
        if self.is_point:
            return self.lo.symbol(unicode)
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo.symbol(unicode)}, {self.hi.symbol(unicode)}{right}"

    def __str__(self) -> str:
        return self.describe()


@dataclass(frozen=True)
class Provenance:
    function: IntFuncKind
    interval: AlphaInterval

    def describe(self, unicode: bool = True) -> str:
        return f"{self.function.value} {self.interval.describe(unicode)}"


@dataclass(frozen=True, eq=False)
class ApproximationRecord:
    """A cataloged candidate int(alpha*C) (or the exact DCT baseline)."""
    name: str
    matrix: Optional[np.ndarray]
    source_function: Optional[IntFuncKind]
    alpha: Optional[AlphaInterval]
    classification: Classification
    delta: Optional[float] = None
    scaling: Optional[ScalingDiagonal] = None
    inverse_factorization: Optional[InverseFactorization] = None
    known_alias: Optional[str] = None
    provenance: Tuple[Provenance, ...] = field(default_factory=tuple)
    equivalent_to: Optional[str] = None
    rejection_reason: Optional[str] = None

    @property
    def is_exact(self) -> bool:
        return self.classification is Classification.EXACT

    @property
    def is_accepted(self) -> bool:
        return self.classification in (Classification.ORTHOGONAL, Classification.NEAR_ORTHOGONAL)

    @property
    def gram_diagonal(self) -> Optional[Tuple[int, ...]]:
        if self.matrix is None:
            return None
        return tuple(int(v) for v in np.diag(gram(self.matrix)))

    def _key(self) -> tuple:
        inverse = None
        if self.inverse_factorization is not None:
            inverse = (
                self.inverse_factorization.factor.tobytes(),
                self.inverse_factorization.diagonal,
            )
        return (
            self.name,
            None if self.matrix is None else self.matrix.astype(np.int64).tobytes(),
            self.source_function,
            self.alpha,
            self.classification,
            None if self.delta is None else round(self.delta, 12),
            self.scaling,
            inverse,
            self.known_alias,
            self.provenance,
            self.equivalent_to,
            self.rejection_reason,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ApproximationRecord):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())


@dataclass(frozen=True)
class Verdict:
    classification: Classification
    delta: Optional[float]
    scaling: Optional[ScalingDiagonal]
    inverse_factorization: Optional[InverseFactorization]
    reason: Optional[str] = None


# -- Ranges & breakpoints -----------------------------------------------------------

def alpha_range(kind: IntFuncKind) -> AlphaInterval:
    """Admissible alpha range, from 0 <= int(alpha * gamma_0 / 2) <= 3."""
    kind = parse_kind(kind)
    if kind in NEAREST_KINDS:
        lo, hi = _NEAREST_RANGE_NUMERATORS
    else:
        lo, hi = _RANGE_NUMERATORS[kind]
    lo_point = AlphaPoint(0, None) if lo == 0 else AlphaPoint(lo, 0)
    return AlphaInterval(lo_point, AlphaPoint(hi, 0), lo_closed=True, hi_closed=True)


def breakpoints(kind: IntFuncKind) -> List[AlphaPoint]:
    """Alphas in the admissible range where some entry hits a discontinuity.

    Step kinds jump where alpha*gamma_k/2 is an integer (alpha = 2l/gamma_k);
    nearest-integer kinds where it is a half-integer (alpha = l/gamma_k, l odd).

    Returns:
        Strictly increasing list; coincident values within tolerance merged.
    """
    kind = parse_kind(kind)
    rng = alpha_range(kind)
    lo, hi = rng.lo.value, rng.hi.value
    first, step = (1, 2) if kind in NEAREST_KINDS else (2, 2)

    points: List[AlphaPoint] = []
    for k, gamma in enumerate(GAMMA):
        numerator = first
        while numerator / gamma <= hi + MERGE_TOLERANCE:
            if numerator / gamma >= lo - MERGE_TOLERANCE:
                points.append(AlphaPoint(numerator, k))
            numerator += step

    points.sort(key=lambda p: p.value)
    merged: List[AlphaPoint] = []
    for point in points:
        if merged and abs(point.value - merged[-1].value) < MERGE_TOLERANCE:
            continue
        merged.append(point)
    return merged


def evaluate(kind: IntFuncKind, alpha: float) -> np.ndarray:
    """int(alpha * C) entrywise."""
    return apply_matrix(kind, alpha * dct_matrix())


# -- Classification -------------------------------------------------------------------

def classify(T: np.ndarray) -> Verdict:
    """Apply the search conditions to one candidate matrix.

    Order: entries in C, null rows, exact orthogonality, the deviation
    threshold, butterfly (parity) structure, then a low-complexity inverse.
    """
    if not entries_in_C(T):
        return Verdict(Classification.REJECTED, None, None, None, "entries outside C")

    g = gram(T)
    delta = deviation_from_diagonality(g) if np.any(g) else None
    if has_null_row(T):
        return Verdict(Classification.DEGENERATE, delta, None, None, None)

    if is_orthogonal(T):
        return Verdict(Classification.ORTHOGONAL, 0.0, orthonormalize(T), None, None)

    if not within_delta_threshold(g):
        return Verdict(Classification.REJECTED, delta, None, None, "deviation from diagonality above threshold")
    if not has_dct_symmetry(T):
        return Verdict(Classification.REJECTED, delta, None, None, "no butterfly structure")
    try:
        inverse = exact_inverse(T)
    except SingularMatrixError:
        return Verdict(Classification.REJECTED, delta, None, None, "singular")
    factorization = factor_inverse_lowcomplexity(inverse)
    if factorization is None:
        return Verdict(Classification.REJECTED, delta, None, None, "inverse not low-complexity")
    return Verdict(Classification.NEAR_ORTHOGONAL, delta, orthonormalize(T), factorization, None)


def _keep(name: Optional[str], classification: Classification) -> bool:
    if classification in (Classification.ORTHOGONAL, Classification.NEAR_ORTHOGONAL, Classification.DEGENERATE):
        return True
    return name is not None


def make_record(
    T: np.ndarray,
    kind: Optional[IntFuncKind],
    interval: Optional[AlphaInterval],
    name: Optional[str] = None,
) -> ApproximationRecord:
    """Classify T and wrap it in a record, naming it if it is a known matrix."""
    verdict = classify(T)
    known = name_for_matrix(T)
    if name is None:
        if known is not None:
            name = known
        elif kind is not None and interval is not None:
            name = f"{kind.value}:{interval.describe(unicode=False).replace(' ', '')}"
        else:
            name = "custom"
    provenance = ()
    if kind is not None and interval is not None:
        provenance = (Provenance(kind, interval),)
    return ApproximationRecord(
        name=name,
        matrix=np.asarray(T, dtype=np.int64),
        source_function=kind,
        alpha=interval,
        classification=verdict.classification,
        delta=verdict.delta,
        scaling=verdict.scaling,
        inverse_factorization=verdict.inverse_factorization,
        known_alias=RECORD_ALIAS.get(known) if known else None,
        provenance=provenance,
        rejection_reason=verdict.reason,
    )


# -- Sweep ------------------------------------------------------------------------------

@dataclass
class _Run:
    matrix: np.ndarray
    lo: AlphaPoint
    lo_closed: bool
    hi: AlphaPoint
    hi_closed: bool


def _pieces(kind: IntFuncKind) -> List[_Run]:
    rng = alpha_range(kind)
    points = breakpoints(kind)
    if not points or points[0].value > rng.lo.value + MERGE_TOLERANCE:
        points.insert(0, rng.lo)
    if points[-1].value < rng.hi.value - MERGE_TOLERANCE:
        points.append(rng.hi)

    pieces: List[_Run] = []
    for i, point in enumerate(points):
        if point.value > 0:
            pieces.append(_Run(evaluate(kind, point.value), point, True, point, True))
        if i + 1 < len(points):
            upper = points[i + 1]
            mid = 0.5 * (point.value + upper.value)
            pieces.append(_Run(evaluate(kind, mid), point, False, upper, False))
    return pieces


def _merge(pieces: Iterable[_Run]) -> List[_Run]:
    runs: List[_Run] = []
    for piece in pieces:
        if runs and np.array_equal(runs[-1].matrix, piece.matrix):
            runs[-1].hi = piece.hi
            runs[-1].hi_closed = piece.hi_closed
        else:
            runs.append(_Run(piece.matrix, piece.lo, piece.lo_closed, piece.hi, piece.hi_closed))
    return runs


def sweep(kind: IntFuncKind) -> List[ApproximationRecord]:
    """All distinct candidates one integer function produces over its range.

    Accepted and degenerate records are returned; rejected candidates are
    dropped unless they carry a catalog name.
    """
    kind = parse_kind(kind)
    records: List[ApproximationRecord] = []
    for run in _merge(_pieces(kind)):
        interval = AlphaInterval(run.lo, run.hi, run.lo_closed, run.hi_closed)
        record = make_record(run.matrix, kind, interval)
        if _keep(name_for_matrix(run.matrix), record.classification):
            records.append(record)
    return records


def exact_dct_record() -> ApproximationRecord:
    """Baseline pseudo-record standing for the exact DCT."""
    return ApproximationRecord(
        name=DCT_NAME,
        matrix=None,
        source_function=None,
        alpha=None,
        classification=Classification.EXACT,
        delta=0.0,
    )


_ORDER = {name: i for i, name in enumerate((DCT_NAME,) + APPROXIMATION_NAMES + REJECTED_NAMES)}


def link_equivalences(records: Sequence[ApproximationRecord]) -> List[ApproximationRecord]:
    """Mark B as equivalent to A when B = D . A for an integer diagonal D >= 1."""
    accepted = [r for r in records if r.is_accepted]
    linked: List[ApproximationRecord] = []
    for record in records:
        target = None
        if record.is_accepted:
            for other in accepted:
                if other is record or np.array_equal(other.matrix, record.matrix):
                    continue
                factors = row_scaling_between(other.matrix, record.matrix)
                if factors and all(f.denominator == 1 and f >= 1 for f in factors):
                    target = other.name
                    break
        linked.append(replace(record, equivalent_to=target) if target else record)
    return linked


def merge_sweeps(sweeps: Sequence[Sequence[ApproximationRecord]]) -> List[ApproximationRecord]:
    """Union of sweeps, one record per distinct matrix, plus the DCT baseline.

    Each record keeps every (function, interval) that produced it in
    ``provenance``; ``source_function``/``alpha`` hold the first one found.
    """
    by_matrix: Dict[bytes, ApproximationRecord] = {}
    for records in sweeps:
        for record in records:
            key = record.matrix.tobytes()
            if key in by_matrix:
                first = by_matrix[key]
                by_matrix[key] = replace(first, provenance=first.provenance + record.provenance)
            else:
                by_matrix[key] = record

    records = sorted(
        by_matrix.values(),
        key=lambda r: (_ORDER.get(r.name, len(_ORDER)), r.classification.value, r.name),
    )
    return [exact_dct_record()] + link_equivalences(records)


def full_catalog(kinds: Optional[Sequence[IntFuncKind]] = None, jobs: int = 1) -> List[ApproximationRecord]:
    """Sweep every kind (all ten by default) and merge the results.

    Sweeps are independent; ``jobs > 1`` runs them on a thread pool. The
    merge happens in the order of ``kinds`` either way.
    """
    kinds = [parse_kind(k) for k in (kinds or list(IntFuncKind))]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            sweeps = list(pool.map(sweep, kinds))
    else:
        sweeps = [sweep(kind) for kind in kinds]
    return merge_sweeps(sweeps)


def find_record(records: Sequence[ApproximationRecord], name: str) -> ApproximationRecord:
    for record in records:
        if record.name == name:
            return record
    raise KeyError(f"No record named {name!r} in catalog")


def summarize(records: Sequence[ApproximationRecord]) -> Dict[str, int]:
    counts: Dict[str, int] = {c.value: 0 for c in Classification}
    for record in records:
        counts[record.classification.value] += 1
    return counts
