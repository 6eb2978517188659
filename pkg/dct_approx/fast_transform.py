"""Multiplierless fast algorithms for DCT-patterned integer matrices.

A structured matrix T(m0..m6) factors as T = P . K . B1 . B2 . B3:

    B3  butterfly      s_i = x_i + x_{7-i},  d_i = x_i - x_{7-i}
    B2  even butterfly v0 = s0+s3, v1 = s1+s2, v2 = s0-s3, v3 = s1-s2
    B1  w0 = v0+v1, w1 = v0-v1, then sign/permutation moves only
    K   block-diagonal constant stage holding m0..m6
    P   output permutation

Plans are straight-line schedules of add/sub/shift steps. Constants of
magnitude 2 cost one shift; 3 costs a shift and an add. Negations are folded
into add/sub where possible and counted apart from additions.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exact_dct import N
from .matrix_lab import (
    as_int_matrix,
    entries_in_C,
    extract_constants,
    has_null_row,
    structured_matrix,
)

# -- Step vocabulary -------------------------------------------------------------
OPS = ("add", "sub", "shl", "neg", "copy", "zero")
STAGES = ("B3", "B2", "B1", "K", "direct")

# Input order of the B1 outputs w0..w7, as (sign, register).
_W_SOURCES: Tuple[Tuple[int, str], ...] = (
    (1, "w0"), (1, "w1"), (1, "v3"), (1, "v2"),
    (-1, "d2"), (1, "d3"), (-1, "d1"), (-1, "d0"),
)

# K row -> output index.
_K_TO_OUTPUT = (0, 4, 2, 6, 1, 3, 5, 7)


@dataclass(frozen=True)
class Step:
    op: str
    dst: str
    a: Optional[str] = None
    b: Optional[str] = None
    bits: int = 0
    stage: str = "K"

    def render(self) -> str:
        if self.op == "add":
            return f"{self.dst} = {self.a} + {self.b}"
        if self.op == "sub":
            return f"{self.dst} = {self.a} - {self.b}"
        if self.op == "shl":
            return f"{self.dst} = {self.a} << {self.bits}"
        if self.op == "neg":
            return f"{self.dst} = -{self.a}"
        if self.op == "copy":
            return f"{self.dst} = {self.a}"
        return f"{self.dst} = 0"


@dataclass(frozen=True)
class OpCounts:
    multiplications: int = 0
    additions: int = 0
    shifts: int = 0
    negations: int = 0

    def as_tuple(self) -> Tuple[int, int, int]:
        """(multiplications, additions, shifts), the order tables report."""
        return (self.multiplications, self.additions, self.shifts)

    def __add__(self, other: "OpCounts") -> "OpCounts":
        return OpCounts(
            self.multiplications + other.multiplications,
            self.additions + other.additions,
            self.shifts + other.shifts,
            self.negations + other.negations,
        )


@dataclass(frozen=True)
class TransformPlan:
    """Executable schedule computing y = T x without multiplications."""
    steps: Tuple[Step, ...]
    counts: OpCounts
    stage_counts: Dict[str, OpCounts] = field(default_factory=dict)
    constants: Optional[Tuple[int, ...]] = None
    name: Optional[str] = None
    fallback: bool = False

    def listing(self) -> str:
        lines = []
        stage = None
        for step in self.steps:
            if step.stage != stage:
                stage = step.stage
                lines.append(f"# {stage}")
            lines.append(f"  {step.render()}")
        c = self.counts
        lines.append(
            f"# total: {c.multiplications} mul, {c.additions} add, "
            f"{c.shifts} shift, {c.negations} neg"
        )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "constants": list(self.constants) if self.constants is not None else None,
            "fallback": self.fallback,
            "counts": {
                "multiplications": self.counts.multiplications,
                "additions": self.counts.additions,
                "shifts": self.counts.shifts,
                "negations": self.counts.negations,
            },
            "stage_counts": {
                stage: list(c.as_tuple()) + [c.negations] for stage, c in self.stage_counts.items()
            },
            "steps": [step.render() for step in self.steps],
        }


# -- Factor matrices --------------------------------------------------------------

def factorization_matrices() -> Dict[str, np.ndarray]:
    """The constant stages B3, B2, B1 and P as integer matrices."""
    b3 = np.zeros((N, N), dtype=np.int64)
    for i in range(4):
        b3[i, i], b3[i, 7 - i] = 1, 1
        b3[4 + i, i], b3[4 + i, 7 - i] = 1, -1

    b2 = np.eye(N, dtype=np.int64)
    b2[:4, :4] = [[1, 0, 0, 1], [0, 1, 1, 0], [1, 0, 0, -1], [0, 1, -1, 0]]

    # B2 output order is (v0, v1, v2, v3, d0, d1, d2, d3).
    index = {"v0": 0, "v1": 1, "v2": 2, "v3": 3, "d0": 4, "d1": 5, "d2": 6, "d3": 7}
    b1 = np.zeros((N, N), dtype=np.int64)
    b1[0, index["v0"]], b1[0, index["v1"]] = 1, 1
    b1[1, index["v0"]], b1[1, index["v1"]] = 1, -1
    for row, (sign, reg) in enumerate(_W_SOURCES[2:], start=2):
        b1[row, index[reg]] = sign

    p = np.zeros((N, N), dtype=np.int64)
    for k_row, out in enumerate(_K_TO_OUTPUT):
        p[out, k_row] = 1
    return {"B3": b3, "B2": b2, "B1": b1, "P": p}


def k_matrix(m: Sequence[int]) -> np.ndarray:
    """Constant stage K for constants m0..m6, in w coordinates."""
    m0, m1, m2, m3, m4, m5, m6 = (int(v) for v in m)
    k = np.zeros((N, N), dtype=np.int64)
    k[0, 0] = m3
    k[1, 1] = m3
    k[2, 2:4] = [m5, m1]
    k[3, 2:4] = [-m1, m5]
    k[4, 4:] = [-m4, m6, -m2, -m0]
    k[5, 4:] = [m0, -m4, m6, -m2]
    k[6, 4:] = [-m6, m2, m0, -m4]
    k[7, 4:] = [-m2, -m0, m4, -m6]
    return k


def factorized_product(m: Sequence[int]) -> np.ndarray:
    f = factorization_matrices()
    return f["P"] @ k_matrix(m) @ f["B1"] @ f["B2"] @ f["B3"]


# -- Schedule synthesis ---------------------------------------------------------------

class _Emitter:
    def __init__(self) -> None:
        self.steps: List[Step] = []
        self._temps = 0

    def temp(self) -> str:
        name = f"t{self._temps}"
        self._temps += 1
        return name

    def emit(self, op: str, dst: str, a: Optional[str] = None, b: Optional[str] = None,
             bits: int = 0, stage: str = "K") -> str:
        self.steps.append(Step(op, dst, a, b, bits, stage))
        return dst

    def linear(self, dst: str, terms: Sequence[Tuple[int, str]], stage: str) -> None:
        """dst = sum(c * reg) with |c| <= 3, using shifts and adds only."""
        scaled: List[Tuple[int, str]] = []
        for coef, reg in terms:
            magnitude = abs(int(coef))
            if magnitude == 0:
                continue
            if magnitude == 1:
                src = reg
            elif magnitude == 2:
                src = self.emit("shl", self.temp(), reg, bits=1, stage=stage)
            elif magnitude == 3:
                doubled = self.emit("shl", self.temp(), reg, bits=1, stage=stage)
                src = self.emit("add", self.temp(), doubled, reg, stage=stage)
            else:
                raise ValueError(f"Constant {coef} is outside the multiplierless set")
            scaled.append((1 if coef > 0 else -1, src))

        if not scaled:
            self.emit("zero", dst, stage=stage)
            return

        # positives first so subtraction absorbs the signs
        scaled.sort(key=lambda t: -t[0])
        first_sign, acc = scaled[0]
        if len(scaled) == 1:
            self.emit("copy" if first_sign > 0 else "neg", dst, acc, stage=stage)
            return

        negate = first_sign < 0
        for sign, src in scaled[1:]:
            op = "add" if negate or sign > 0 else "sub"
            acc = self.emit(op, dst if not negate else self.temp(), acc, src, stage=stage)
        if negate:
            self.emit("neg", dst, acc, stage=stage)


def _structured_schedule(m: Sequence[int]) -> List[Step]:
    em = _Emitter()
    for i in range(4):
        em.emit("add", f"s{i}", f"x{i}", f"x{7 - i}", stage="B3")
    for i in range(4):
        em.emit("sub", f"d{i}", f"x{i}", f"x{7 - i}", stage="B3")
    em.emit("add", "v0", "s0", "s3", stage="B2")
    em.emit("add", "v1", "s1", "s2", stage="B2")
    em.emit("sub", "v2", "s0", "s3", stage="B2")
    em.emit("sub", "v3", "s1", "s2", stage="B2")
    em.emit("add", "w0", "v0", "v1", stage="B1")
    em.emit("sub", "w1", "v0", "v1", stage="B1")

    k = k_matrix(m)
    for k_row, out in enumerate(_K_TO_OUTPUT):
        terms = [
            (int(k[k_row, j]) * sign, reg)
            for j, (sign, reg) in enumerate(_W_SOURCES)
        ]
        em.linear(f"y{out}", terms, stage="K")
    return em.steps


def _direct_schedule(T: np.ndarray) -> List[Step]:
    em = _Emitter()
    for i in range(N):
        em.linear(f"y{i}", [(int(T[i, j]), f"x{j}") for j in range(N)], stage="direct")
    return em.steps


def stage_counts(steps: Sequence[Step]) -> Dict[str, OpCounts]:
    """Operation counts of a schedule, per stage."""
    per_stage: Dict[str, OpCounts] = {}
    for step in steps:
        delta = OpCounts(
            additions=int(step.op in ("add", "sub")),
            shifts=int(step.op == "shl"),
            negations=int(step.op == "neg"),
        )
        per_stage[step.stage] = per_stage.get(step.stage, OpCounts()) + delta
    return per_stage


def count_ops(plan) -> OpCounts:
    """Totals over a plan (or a bare step list)."""
    total = OpCounts()
    for counts in stage_counts(getattr(plan, "steps", plan)).values():
        total = total + counts
    return total


def build_plan(source, constants: Optional[Sequence[int]] = None) -> TransformPlan:
    """Build the fast algorithm for a record or an integer matrix.

    DCT-patterned matrices get the butterfly factorization, after checking
    that P.K.B1.B2.B3 reproduces them exactly. Anything else in C without
    null rows gets a direct row-by-row schedule (``fallback=True``).

    Args:
        source: An ApproximationRecord or an 8x8 integer matrix.
        constants: Optional m0..m6; must reproduce the matrix when given.

    Raises:
        ValueError: For degenerate matrices, entries outside C, or
            constants that do not match the matrix.
        RuntimeError: If the factorization fails to reproduce the matrix.
    """
    name = getattr(source, "name", None)
    matrix = getattr(source, "matrix", source)
    if matrix is None:
        raise ValueError("The exact DCT has no integer fast algorithm")
    T = as_int_matrix(matrix)
    if not entries_in_C(T):
        raise ValueError("Matrix has entries outside {0, +-1, +-2, +-3}")
    if has_null_row(T):
        raise ValueError("Cannot build a fast algorithm for a degenerate matrix")

    if constants is not None:
        m = tuple(int(v) for v in constants)
        if not np.array_equal(structured_matrix(m), T):
            raise ValueError(f"Constants {m} do not reproduce the given matrix")
    else:
        m = extract_constants(T)

    if m is None:
        steps = _direct_schedule(T)
        fallback = True
    else:
        if not np.array_equal(factorized_product(m), T):
            raise RuntimeError(f"Factorization does not reproduce the matrix for constants {m}")
        steps = _structured_schedule(m)
        fallback = False

    per_stage = stage_counts(steps)
    total = count_ops(steps)
    return TransformPlan(
        steps=tuple(steps),
        counts=total,
        stage_counts=per_stage,
        constants=m,
        name=name,
        fallback=fallback,
    )


# -- Execution -------------------------------------------------------------------------

def _is_integer(value) -> bool:
    return isinstance(value, (int, np.integer)) or (
        isinstance(value, np.ndarray) and np.issubdtype(value.dtype, np.integer)
    )


def _run(plan: TransformPlan, x, trace: Optional[List] = None) -> Dict[str, object]:
    arr = np.asarray(x)
    if arr.shape[:1] != (N,):
        raise ValueError(f"Input must have length {N} along axis 0, got shape {arr.shape}")
    regs: Dict[str, object] = {f"x{i}": arr[i] for i in range(N)}
    for step in plan.steps:
        if step.op == "add":
            value = regs[step.a] + regs[step.b]
        elif step.op == "sub":
            value = regs[step.a] - regs[step.b]
        elif step.op == "shl":
            a = regs[step.a]
            value = a << step.bits if _is_integer(a) else a * (1 << step.bits)
        elif step.op == "neg":
            value = -regs[step.a]
        elif step.op == "copy":
            value = regs[step.a]
        else:
            value = arr[0] * 0
        regs[step.dst] = value
        if trace is not None:
            trace.append(value)
    return regs


def apply_plan(plan: TransformPlan, x) -> np.ndarray:
    """Run the plan on a length-8 vector, or on every column of an (8, ...) array."""
    regs = _run(plan, x)
    return np.stack([np.asarray(regs[f"y{i}"]) for i in range(N)])


def max_intermediate(plan: TransformPlan, x) -> int:
    """Largest magnitude any register reaches while transforming x."""
    trace: List = [np.asarray(x)]
    _run(plan, x, trace)
    return int(max(np.max(np.abs(np.asarray(v))) for v in trace))


def plan_matrix(plan: TransformPlan) -> np.ndarray:
    """Matrix the plan actually computes, read off the unit vectors."""
    return apply_plan(plan, np.eye(N, dtype=np.int64)).astype(np.int64)
