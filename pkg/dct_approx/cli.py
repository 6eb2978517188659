"""Command-line entry point: ``python -m dct_approx <command> ...``.

Commands:
  search      sweep the integer functions and write the catalog
  show        dossier of one transform
  complexity  operation counts of the fast algorithms, checked against the tables
  compress    compress one image and report PSNR/SSIM
  sweep-r     corpus quality curves over a range of r
  verify      golden checks of the whole catalog

Exit codes: 0 success, 1 usage, 2 I/O, 3 verification failure.
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .catalog import (
    APPROXIMATION_NAMES,
    CONSTANTS,
    DCT_NAME,
    DELTA_TOLERANCE,
    EXPECTED_COMPLEXITY,
    EXPECTED_DELTAS,
    EXPECTED_EQUIVALENCES,
    EXPECTED_GRAM_DIAGONALS,
    EXPECTED_INVERSE_DIAGONALS,
    named_matrix,
    resolve_name,
)
from .catalog_store import (
    CatalogFile,
    CatalogIntegrityError,
    default_catalog_path,
    load_catalog,
    resolve_record,
    save_catalog,
)
from .codec import compress_image
from .fast_transform import apply_plan, build_plan, factorized_product, max_intermediate
from .image_io import list_corpus, load_image, write_pgm
from .integer_functions import IntFuncKind, parse_kind
from .matrix_lab import format_rational, normalized_transform, row_scaling_between
from .metrics import (
    PSNR_INF,
    coding_gain,
    corpus_curves,
    dct_proximity,
    psnr,
    ssim,
    trend_report,
)
from .search import (
    ApproximationRecord,
    Classification,
    alpha_range,
    evaluate,
    exact_dct_record,
    merge_sweeps,
    sweep,
)

# -- Exit codes -------------------------------------------------------------------
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VERIFY = 3

DEFAULT_SEED = 0
DEFAULT_R_MIN, DEFAULT_R_MAX = 1, 45
SWEEP_OUTPUT_DIR = "sweep_outputs"


class UsageError(Exception):
    """Bad command-line input discovered after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"error: {message}\n")


@dataclass
class RunConfig:
    command: str
    transforms: List[str] = field(default_factory=list)
    corpus: Optional[str] = None
    r_values: List[int] = field(default_factory=list)
    output: Optional[str] = None
    catalog: Optional[str] = None
    scale_before_retention: bool = True
    level_shift: bool = True
    jobs: int = 1
    seed: int = DEFAULT_SEED


class Console:
    """stdout for results, stderr for errors; --quiet drops progress lines."""

    def __init__(self, quiet: bool = False):
        self.quiet = quiet

    def out(self, text: str = "") -> None:
        print(text)

    def progress(self, i: int, total: int, label: str) -> None:
        if not self.quiet:
            print(f"[{i}/{total}] {label}")

    def warn(self, text: str) -> None:
        print(f"warning: {text}", file=sys.stderr)


# -- Helpers ----------------------------------------------------------------------------

def _parse_functions(text: str) -> List[IntFuncKind]:
    if text.strip().lower() == "all":
        return list(IntFuncKind)
    return [parse_kind(part) for part in text.split(",") if part.strip()]


def _load(args) -> CatalogFile:
    path = default_catalog_path(args.catalog)
    if not path.exists():
        raise FileNotFoundError(f"Catalog not found at {path}; run `search` first or pass --catalog")
    return load_catalog(path)


def _record(args, selector: str) -> ApproximationRecord:
    if resolve_name(selector) == DCT_NAME:
        return exact_dct_record()
    return resolve_record(_load(args), selector)


def _fmt_delta(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def _fmt_matrix(matrix: np.ndarray, indent: str = "    ") -> str:
    width = max(len(str(int(v))) for v in matrix.flat)
    return "\n".join(indent + " ".join(f"{int(v):>{width}}" for v in row) for row in matrix)


def _fmt_psnr(value: float) -> str:
    return "inf" if value == PSNR_INF else f"{value:.3f}"


def _split_counts(records: Sequence[ApproximationRecord]) -> Dict[str, int]:
    counts = {"accepted": 0, "degenerate": 0, "degenerate_points": 0, "rejected": 0}
    for record in records:
        if record.is_accepted:
            counts["accepted"] += 1
        elif record.classification is Classification.DEGENERATE:
            key = "degenerate_points" if record.alpha is not None and record.alpha.is_point else "degenerate"
            counts[key] += 1
        elif record.classification is Classification.REJECTED:
            counts["rejected"] += 1
    return counts


# -- search -------------------------------------------------------------------------------

def cmd_search(args, console: Console) -> int:
    kinds = _parse_functions(args.functions)
    sweeps = []
    for i, kind in enumerate(kinds, start=1):
        console.progress(i, len(kinds), f"sweeping {kind.value}")
        records = sweep(kind)
        sweeps.append(records)
        console.out(f"\n== {kind.value}  alpha in {alpha_range(kind)} ==")
        console.out(f"  {'name':<24}{'interval':<22}{'class':<17}{'delta':>8}")
        for record in records:
            label = record.name + (f" ({record.known_alias})" if record.known_alias else "")
            note = f"  [{record.rejection_reason}]" if record.rejection_reason else ""
            console.out(
                f"  {label:<24}{str(record.alpha):<22}{record.classification.value:<17}"
                f"{_fmt_delta(record.delta):>8}{note}"
            )
        c = _split_counts(records)
        console.out(
            f"  -> {c['accepted']} accepted, {c['degenerate']} degenerate "
            f"(+{c['degenerate_points']} at single breakpoints), {c['rejected']} rejected"
        )

    catalog = merge_sweeps(sweeps)
    path = save_catalog(catalog, default_catalog_path(args.output or args.catalog))
    c = _split_counts(catalog)
    console.out(
        f"\nCatalog: {c['accepted']} accepted, {c['degenerate']} degenerate "
        f"(+{c['degenerate_points']} at single breakpoints), {c['rejected']} rejected"
    )
    console.out(f"Written to: {path}")
    return EXIT_OK


# -- show ----------------------------------------------------------------------------------

def cmd_show(args, console: Console) -> int:
    record = _record(args, args.transform)
    alias = f" ({record.known_alias})" if record.known_alias else ""
    console.out(f"{record.name}{alias}: {record.classification.value}")
    if record.is_exact:
        console.out(f"  coding gain (rho=0.95): {coding_gain(record):.4f} dB")
        return EXIT_OK

    console.out(f"  source: {record.source_function.value if record.source_function else '-'} {record.alpha or ''}")
    for p in record.provenance:
        console.out(f"    produced by {p.describe()}")
    console.out("  matrix:")
    console.out(_fmt_matrix(record.matrix))
    console.out(f"  diag(T T^T): {list(record.gram_diagonal)}")
    console.out(f"  delta: {_fmt_delta(record.delta)}")
    if record.rejection_reason:
        console.out(f"  rejected: {record.rejection_reason}")
    if record.scaling:
        console.out("  scaling d^2: [" + ", ".join(format_rational(v) for v in record.scaling.d_squared) + "]")
    if record.inverse_factorization:
        inv = record.inverse_factorization
        console.out("  inverse = E . diag(" + ", ".join(format_rational(v) for v in inv.diagonal) + "), E:")
        console.out(_fmt_matrix(inv.factor))
    if record.equivalent_to:
        console.out(f"  equivalent to {record.equivalent_to}: same normalized transform up to row scaling")
    if record.is_accepted:
        plan = build_plan(record)
        c = plan.counts
        constants = list(plan.constants) if plan.constants else "direct schedule"
        console.out(f"  fast algorithm m: {constants}")
        console.out(f"  operations: {c.multiplications} mul, {c.additions} add, {c.shifts} shift ({c.negations} neg)")
        for stage, sc in plan.stage_counts.items():
            console.out(f"    {stage:<7}{sc.additions:>3} add {sc.shifts:>3} shift")
        proximity = dct_proximity(record)
        console.out(f"  coding gain (rho=0.95): {coding_gain(record):.4f} dB")
        console.out(f"  DCT proximity: mse {proximity.mse:.6f}, error energy {proximity.total_error_energy:.4f}")
        if args.listing:
            console.out(plan.listing())
    return EXIT_OK


# -- complexity ------------------------------------------------------------------------------

def cmd_complexity(args, console: Console) -> int:
    catalog = _load(args)
    mismatches = 0
    console.out(f"{'name':<6}{'mult':>6}{'add':>6}{'shift':>6}")
    for record in catalog.accepted:
        counts = build_plan(record).counts.as_tuple()
        expected = EXPECTED_COMPLEXITY.get(record.name)
        flag = ""
        if expected is not None and counts != expected:
            mismatches += 1
            flag = f"  MISMATCH, expected {expected}"
        console.out(f"{record.name:<6}{counts[0]:>6}{counts[1]:>6}{counts[2]:>6}{flag}")
    if mismatches:
        console.out(f"\n{mismatches} row(s) disagree with the expected counts")
        return EXIT_VERIFY
    return EXIT_OK


# -- compress -----------------------------------------------------------------------------------

def cmd_compress(args, console: Console) -> int:
    record = _record(args, args.transform)
    image = load_image(args.image)
    recon = compress_image(
        record, image, args.r,
        scale_before_retention=args.scale_before_retention,
        level_shift=not args.no_level_shift,
    )
    src = Path(args.image)
    out = Path(args.out) if args.out else src.with_name(f"{src.stem}_{record.name.replace('~', 't')}_r{args.r}.pgm")
    write_pgm(out, recon)
    console.out(f"{record.name} r={args.r}: PSNR={_fmt_psnr(psnr(image, recon))} SSIM={ssim(image, recon):.4f}")
    console.out(f"Written to: {out}")
    return EXIT_OK


# -- sweep-r --------------------------------------------------------------------------------------

def _load_corpus(directory: str, console: Console) -> List[Tuple[str, np.ndarray]]:
    images = []
    for path in list_corpus(directory):
        try:
            images.append((path.name, load_image(path)))
        except (ValueError, ImportError) as e:
            console.warn(f"skipping {path.name}: {e}")
    if not images:
        raise ValueError(f"No usable images in corpus {directory}")
    return images


def cmd_sweep_r(args, console: Console) -> int:
    if not 1 <= args.r_min <= args.r_max <= 64:
        raise UsageError(f"Need 1 <= r-min <= r-max <= 64, got {args.r_min}..{args.r_max}")
    if args.transforms.strip().lower() == "all":
        records = [exact_dct_record()] + _load(args).accepted
    else:
        records = [_record(args, name.strip()) for name in args.transforms.split(",") if name.strip()]
    images = _load_corpus(args.corpus, console)
    r_values = list(range(args.r_min, args.r_max + 1))

    report = corpus_curves(
        records, images, r_values,
        scale_before_retention=args.scale_before_retention,
        level_shift=not args.no_level_shift,
        jobs=args.jobs,
        progress=console.progress,
    )

    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(out_dir / "curves.csv")
    report.write_json(out_dir / "curves.json")
    config = RunConfig(
        command="sweep-r",
        transforms=[r.name for r in records],
        corpus=str(args.corpus),
        r_values=r_values,
        output=str(out_dir),
        catalog=args.catalog,
        scale_before_retention=args.scale_before_retention,
        level_shift=not args.no_level_shift,
        jobs=args.jobs,
        seed=args.seed,
    )
    (out_dir / "run_config.json").write_text(json.dumps(asdict(config), indent=2), encoding="utf-8")

    console.out("\nTrend report:")
    for check in trend_report(report):
        detail = f"  ({check.detail})" if check.detail else ""
        console.out(f"  {check.status:<5} {check.label}{detail}")
    console.out(f"\nOutputs written to: {out_dir}")
    return EXIT_OK


# -- verify ------------------------------------------------------------------------------------------

def _golden_checks(records: Sequence[ApproximationRecord], seed: int) -> List[Tuple[str, bool, str]]:
    by_name = {r.name: r for r in records}
    checks: List[Tuple[str, bool, str]] = []

    def check(label: str, ok: bool, detail: str = "") -> None:
        checks.append((label, bool(ok), detail))

    for name in APPROXIMATION_NAMES:
        record = by_name.get(name)
        check(f"{name} found by the sweep", record is not None)
        if record is None:
            continue
        check(f"{name} matrix", np.array_equal(record.matrix, named_matrix(name)))
        check(f"{name} factorization P.K.B1.B2.B3", np.array_equal(factorized_product(CONSTANTS[name]), record.matrix))
        plan = build_plan(record)
        counts = plan.counts.as_tuple()
        check(f"{name} complexity {EXPECTED_COMPLEXITY[name]}", counts == EXPECTED_COMPLEXITY[name], f"got {counts}")
        rng = np.random.default_rng(seed)
        x = rng.integers(-256, 256, size=(8, 1000))
        check(f"{name} plan bit-exact", np.array_equal(apply_plan(plan, x), record.matrix @ x))
        width = max_intermediate(plan, rng.integers(-128, 128, size=(8, 1000)))
        check(f"{name} intermediates fit 16 bits", width < 2 ** 15, f"max |value| {width}")
        if name in EXPECTED_GRAM_DIAGONALS:
            check(f"{name} gram diagonal", record.gram_diagonal == EXPECTED_GRAM_DIAGONALS[name], str(record.gram_diagonal))
        if name in EXPECTED_DELTAS:
            check(f"{name} delta", abs(record.delta - EXPECTED_DELTAS[name]) <= DELTA_TOLERANCE, f"{record.delta:.6f}")
        if name in EXPECTED_INVERSE_DIAGONALS:
            diag = record.inverse_factorization.diagonal if record.inverse_factorization else None
            check(f"{name} inverse diagonal", diag == EXPECTED_INVERSE_DIAGONALS[name])
        for p in record.provenance:
            alphas = p.interval.sample(rng, 5)
            ok = all(np.array_equal(evaluate(p.function, a), record.matrix) for a in alphas)
            check(f"{name} interval {p.describe()}", ok)

    for name, (target, factors) in EXPECTED_EQUIVALENCES.items():
        a, b = by_name.get(target), by_name.get(name)
        if a is None or b is None:
            continue
        diag = ",".join(str(f) for f in factors)
        check(f"{name} = diag({diag}) . {target}", row_scaling_between(a.matrix, b.matrix) == factors)
        check(f"{target} and {name} normalize alike",
              np.allclose(normalized_transform(a.matrix), normalized_transform(b.matrix), atol=1e-12))
        check(f"{name} linked to {target}", b.equivalent_to == target)
    unexpected = sorted(r.name for r in records if r.equivalent_to and r.name not in EXPECTED_EQUIVALENCES)
    check("no other equivalence links", not unexpected, ", ".join(unexpected))
    t0 = by_name.get("T~0")
    check("T~0 rejected", t0 is not None and t0.classification is Classification.REJECTED)
    if t0 is not None:
        check("T~0 delta", abs(t0.delta - EXPECTED_DELTAS["T~0"]) <= DELTA_TOLERANCE, f"{t0.delta:.6f}")
    floor_accepted = [r for r in records if r.is_accepted and any(p.function is IntFuncKind.FLOOR for p in r.provenance)]
    check("floor yields no accepted matrix", not floor_accepted)
    return checks


def cmd_verify(args, console: Console) -> int:
    kinds = list(IntFuncKind)
    sweeps = []
    for i, kind in enumerate(kinds, start=1):
        console.progress(i, len(kinds), f"sweeping {kind.value}")
        sweeps.append(sweep(kind))
    records = merge_sweeps(sweeps)

    path = default_catalog_path(args.catalog)
    if path.exists():
        load_catalog(path)
        console.out(f"Catalog {path} passed its integrity recheck")

    checks = _golden_checks(records, args.seed)
    failed = 0
    for label, ok, detail in checks:
        if not ok:
            failed += 1
        suffix = f"  ({detail})" if detail and not ok else ""
        console.out(f"  {'PASS' if ok else 'FAIL'}  {label}{suffix}")
    console.out(f"\n{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_VERIFY if failed else EXIT_OK


# -- Parser --------------------------------------------------------------------------------------------

def _add_codec_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--scale-before-retention", dest="scale_before_retention", action="store_true", default=True,
        help="Scale coefficients by d_i*d_j before zeroing (default).",
    )
    group.add_argument(
        "--scale-after-retention", dest="scale_before_retention", action="store_false",
        help="Zero integer coefficients first, then scale.",
    )
    parser.add_argument("--no-level-shift", action="store_true", help="Skip the -128 level shift.")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dct_approx", description="Low-complexity DCT approximation lab.")
    parser.add_argument("--catalog", default=None, help="Catalog path (default: $DCTLAB_CATALOG or ./catalog.json).")
    parser.add_argument("--quiet", action="store_true", help="Suppress progress lines.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for randomized checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", help="Sweep integer functions and write the catalog.")
    p.add_argument("--functions", default="all", help="Comma-separated kinds or 'all'.")
    p.add_argument("--output", default=None, help="Catalog output path (default: the catalog path).")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("show", help="Print everything known about one transform.")
    p.add_argument("transform", help="Name or alias, e.g. T3, T~2, SDCT.")
    p.add_argument("--listing", action="store_true", help="Also print the fast-algorithm schedule.")
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("complexity", help="Operation counts of every accepted transform.")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("compress", help="Compress one image.")
    p.add_argument("image", help="PGM or PNG, 8-bit grayscale, sides multiple of 8.")
    p.add_argument("--t", "--transform", dest="transform", required=True, help="Transform name or alias.")
    p.add_argument("--r", type=int, required=True, help="Retained coefficients per block (1..64).")
    p.add_argument("--out", default=None, help="Output PGM path.")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("sweep-r", help="Corpus PSNR/SSIM/APE curves.")
    p.add_argument("corpus", help="Directory of PGM/PNG images.")
    p.add_argument("--transforms", default="all", help="Comma-separated names or 'all'.")
    p.add_argument("--r-min", type=int, default=DEFAULT_R_MIN)
    p.add_argument("--r-max", type=int, default=DEFAULT_R_MAX)
    p.add_argument("--output-dir", default=SWEEP_OUTPUT_DIR)
    p.add_argument("--jobs", type=int, default=1, help="Parallel (transform, image) evaluations.")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_sweep_r)

    p = sub.add_parser("verify", help="Run the golden checks.")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    console = Console(quiet=args.quiet)
    try:
        return args.func(args, console)
    except CatalogIntegrityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except KeyError as e:
        print(f"error: {e.args[0] if e.args else e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, ImportError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
