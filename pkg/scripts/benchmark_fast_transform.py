"""Benchmark script for the multiplierless fast transforms.

Times each accepted approximation's add/shift schedule against a plain
integer matrix product and the float DCT, and times whole-image
compression through the block codec.

Run:  python scripts/benchmark_fast_transform.py [--vectors 100000] [--size 512]
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from dct_approx.catalog import APPROXIMATION_NAMES, named_matrix
from dct_approx.codec import BlockTransform, compress_image
from dct_approx.exact_dct import dct_matrix
from dct_approx.fast_transform import apply_plan, build_plan
from dct_approx.search import exact_dct_record, make_record

OUTPUT_DIR = REPO_ROOT / "benchmark_outputs"


@dataclass
class BenchmarkResult:
    transform: str
    additions: int
    shifts: int
    vectors: int
    plan_ms: float
    int_matmul_ms: float
    float_dct_ms: float
    image_size: int
    compress_ms: float


def _timed(fn, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        t1 = time.perf_counter()
        times.append((t1 - t0) * 1000)
    return round(min(times), 3)


def make_test_image(size: int) -> np.ndarray:
    """Smooth gradient plus noise, 8-bit."""
    rng = np.random.default_rng(42)
    y, x = np.mgrid[0:size, 0:size]
    base = 128 + 60 * np.sin(x / 17.0) + 40 * np.cos(y / 23.0)
    return np.clip(np.round(base + rng.normal(0, 10, size=(size, size))), 0, 255).astype(np.uint8)


def benchmark_transform(name: str, vectors: np.ndarray, image: np.ndarray, repeats: int) -> BenchmarkResult:
    """Benchmark one named approximation."""
    record = make_record(named_matrix(name), None, None, name=name)
    plan = build_plan(record)
    T = record.matrix
    c = dct_matrix()
    as_float = vectors.astype(np.float64)

    # Warmup
    apply_plan(plan, vectors)
    bt = BlockTransform.from_record(record)

    return BenchmarkResult(
        transform=name,
        additions=plan.counts.additions,
        shifts=plan.counts.shifts,
        vectors=vectors.shape[1],
        plan_ms=_timed(lambda: apply_plan(plan, vectors), repeats),
        int_matmul_ms=_timed(lambda: T @ vectors, repeats),
        float_dct_ms=_timed(lambda: c @ as_float, repeats),
        image_size=image.shape[0],
        compress_ms=_timed(lambda: compress_image(bt, image, 10), repeats),
    )


def run_benchmarks(num_vectors: int, size: int, repeats: int) -> List[BenchmarkResult]:
    rng = np.random.default_rng(0)
    vectors = rng.integers(-128, 128, size=(8, num_vectors), dtype=np.int64)
    image = make_test_image(size)

    results = []
    for count, name in enumerate(APPROXIMATION_NAMES, start=1):
        print(f"  [{count}/{len(APPROXIMATION_NAMES)}] {name}")
        results.append(benchmark_transform(name, vectors, image, repeats))

    baseline = BlockTransform.from_record(exact_dct_record())
    results.append(BenchmarkResult(
        transform="DCT",
        additions=0,
        shifts=0,
        vectors=num_vectors,
        plan_ms=float("nan"),
        int_matmul_ms=float("nan"),
        float_dct_ms=_timed(lambda: dct_matrix() @ vectors.astype(np.float64), repeats),
        image_size=size,
        compress_ms=_timed(lambda: compress_image(baseline, image, 10), repeats),
    ))
    return results


def write_csv(results: List[BenchmarkResult], path: Path):
    fields = [
        "transform", "additions", "shifts", "vectors", "plan_ms",
        "int_matmul_ms", "float_dct_ms", "image_size", "compress_ms",
    ]
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        for r in results:
            writer.writerow({field: getattr(r, field) for field in fields})


def print_report(results: List[BenchmarkResult]):
    """Print a summary report to stdout."""
    print("\n" + "=" * 72)
    print("Fast Transform Benchmark Report")
    print("=" * 72)
    print(f"{'Name':>6} {'Add':>4} {'Shift':>5} {'Plan ms':>9} {'T@x ms':>9} "
          f"{'C@x ms':>9} {'Image ms':>9}")
    print("-" * 72)
    for r in results:
        print(
            f"{r.transform:>6} {r.additions:>4} {r.shifts:>5} "
            f"{r.plan_ms:>9.3f} {r.int_matmul_ms:>9.3f} "
            f"{r.float_dct_ms:>9.3f} {r.compress_ms:>9.3f}"
        )


def parse_args():
    parser = argparse.ArgumentParser(description="Benchmark the fast transforms")
    parser.add_argument("--vectors", type=int, default=100_000, help="Input vectors per timing run")
    parser.add_argument("--size", type=int, default=512, help="Side of the test image (multiple of 8)")
    parser.add_argument("--repeats", type=int, default=3)
    return parser.parse_args()


def main():
    args = parse_args()
    print("Running fast transform benchmarks...")
    print(f"{args.vectors} vectors, {args.size}x{args.size} image, best of {args.repeats}")

    results = run_benchmarks(args.vectors, args.size, args.repeats)

    OUTPUT_DIR.mkdir(exist_ok=True)
    csv_path = OUTPUT_DIR / "fast_transform_benchmark.csv"
    write_csv(results, csv_path)
    print(f"\nResults written to {csv_path}")

    print_report(results)


if __name__ == "__main__":
    main()
