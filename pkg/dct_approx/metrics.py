"""Image quality and transform figures of merit.

PSNR and SSIM compare reconstructions with originals; APE expresses a
transform's corpus mean relative to the exact DCT. Coding gain and DCT
proximity rate a transform matrix on a first-order Markov source.
"""

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .codec import BlockTransform, analyze_image, synthesize_image
from .exact_dct import N, dct_matrix
from .matrix_lab import normalized_transform
from .search import ApproximationRecord, exact_dct_record

# -- PSNR ---------------------------------------------------------------------------
PEAK = 255.0
# Identical images; excluded from corpus means.
PSNR_INF = math.inf

# -- SSIM (Gaussian window 11x11, sigma 1.5) --------------------------------------------
SSIM_SIGMA = 1.5
SSIM_WINDOW = 11
SSIM_K1 = 0.01
SSIM_K2 = 0.03

# -- Markov source for coding gain / proximity -------------------------------------------
DEFAULT_RHO = 0.95

CURVE_FIELDS = ["transform", "r", "psnr", "ssim", "ape_psnr", "ape_ssim"]
DEFAULT_R_RANGE = range(1, 46)


def _require_skimage():
    try:
        from skimage.metrics import structural_similarity
        return structural_similarity
    except ImportError:
        raise ImportError(
            "SSIM requested but scikit-image is not installed. "
            "Install it with: pip install scikit-image"
        )


def _pair(a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"Image dimensions differ: {x.shape} vs {y.shape}")
    if x.ndim != 2:
        raise ValueError(f"Expected 2-D grayscale images, got shape {x.shape}")
    return x, y


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10*log10(255^2 / MSE); PSNR_INF when the images are identical."""
    x, y = _pair(a, b)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return PSNR_INF
    return 10.0 * math.log10(PEAK * PEAK / mse)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM with the reference parameters (L=255, K1=0.01, K2=0.03).

    Raises:
        ValueError: If shapes differ or either side is below 11 pixels.
    """
    x, y = _pair(a, b)
    if min(x.shape) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {x.shape}")
    structural_similarity = _require_skimage()
    return float(structural_similarity(
        x, y,
        data_range=PEAK,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


def ape(value: float, baseline: float) -> float:
    """Absolute percentage error of value relative to baseline."""
    if baseline == 0:
        raise ValueError("APE baseline must be nonzero")
    if math.isinf(baseline) or math.isinf(value):
        return 0.0 if value == baseline else math.nan
    return 100.0 * abs(value - baseline) / abs(baseline)


# -- Transform figures of merit ----------------------------------------------------------

def markov_covariance(rho: float = DEFAULT_RHO, size: int = N) -> np.ndarray:
    idx = np.arange(size)
    return rho ** np.abs(idx[:, np.newaxis] - idx[np.newaxis, :])


def _analysis_matrix(source) -> np.ndarray:
    matrix = getattr(source, "matrix", source)
    if matrix is None:
        return dct_matrix()
    arr = np.asarray(matrix)
    if np.issubdtype(arr.dtype, np.integer):
        return normalized_transform(arr)
    return arr.astype(np.float64)


def coding_gain(source, rho: float = DEFAULT_RHO) -> float:
    """Transform coding gain in dB for a first-order Markov source.

    Non-orthogonal transforms use the biorthogonal form: each band's
    variance is weighted by the energy of its synthesis basis vector.

    Args:
        source: Record, integer matrix T (normalized here) or a float
            analysis matrix. A record without a matrix is the exact DCT.
        rho: Correlation coefficient of the source.
    """
    analysis = _analysis_matrix(source)
    synthesis = np.linalg.inv(analysis)
    R = markov_covariance(rho, analysis.shape[0])
    variances = np.einsum("ij,jk,ik->i", analysis, R, analysis)
    basis_energy = np.sum(synthesis ** 2, axis=0)
    product = np.prod(variances * basis_energy) ** (1.0 / analysis.shape[0])
    return 10.0 * math.log10(1.0 / product)


@dataclass(frozen=True)
class DctProximity:
    mse: float
    total_error_energy: float


def dct_proximity(source, rho: float = DEFAULT_RHO) -> DctProximity:
    """Distance of the normalized transform from the exact DCT.

    ``mse`` is tr((C - A) R (C - A)^T) / 8; ``total_error_energy`` is
    pi * ||C - A||_F^2, the summed squared gap between the frequency
    responses of corresponding rows.
    """
    diff = dct_matrix() - _analysis_matrix(source)
    R = markov_covariance(rho, diff.shape[0])
    mse = float(np.trace(diff @ R @ diff.T)) / diff.shape[0]
    energy = math.pi * float(np.sum(diff ** 2))
    return DctProximity(mse=mse, total_error_energy=energy)


# -- Corpus curves --------------------------------------------------------------------------

@dataclass(frozen=True)
class ImageQuality:
    transform: str
    image: str
    r: int
    psnr: float
    ssim: float


@dataclass(frozen=True)
class CurvePoint:
    transform: str
    r: int
    psnr: float
    ssim: float
    ape_psnr: float
    ape_ssim: float


@dataclass
class QualityReport:
    transforms: List[str]
    images: List[str]
    r_values: List[int]
    per_image: List[ImageQuality] = field(default_factory=list)
    curves: List[CurvePoint] = field(default_factory=list)

    def curve(self, transform: str) -> List[CurvePoint]:
        return [p for p in self.curves if p.transform == transform]

    def mean_psnr(self, transform: str) -> Dict[int, float]:
        return {p.r: p.psnr for p in self.curve(transform)}

    def rows(self) -> List[dict]:
        return [asdict(p) for p in self.curves]

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=CURVE_FIELDS)
            writer.writeheader()
            for row in self.rows():
                writer.writerow({k: _fmt(v) for k, v in row.items()})

    def to_dict(self) -> dict:
        return {
            "transforms": self.transforms,
            "images": self.images,
            "r_values": self.r_values,
            "curves": [{k: _json_number(v) for k, v in row.items()} for row in self.rows()],
            "per_image": [{k: _json_number(v) for k, v in asdict(q).items()} for q in self.per_image],
        }

    def write_json(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")


def _fmt(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return f"{value:.6f}"
    return value


def _json_number(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _mean_finite(values: Sequence[float]) -> float:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return PSNR_INF
    return float(np.mean(finite))


def _evaluate_pair(
    record: ApproximationRecord,
    name: str,
    image: np.ndarray,
    r_values: Sequence[int],
    scale_before_retention: bool,
    level_shift: bool,
) -> List[ImageQuality]:
    bt = BlockTransform.from_record(record)
    coeffs = analyze_image(bt, image, scale_before_retention, level_shift)
    out = []
    for r in r_values:
        recon = synthesize_image(bt, coeffs, image.shape, r, scale_before_retention, level_shift)
        out.append(ImageQuality(record.name, name, int(r), psnr(image, recon), ssim(image, recon)))
    return out


def corpus_curves(
    transforms: Sequence[ApproximationRecord],
    images: Sequence[Tuple[str, np.ndarray]],
    r_range: Sequence[int] = DEFAULT_R_RANGE,
    scale_before_retention: bool = True,
    level_shift: bool = True,
    jobs: int = 1,
    progress: Optional[Callable[[int, int, str], None]] = None,
) -> QualityReport:
    """Mean PSNR/SSIM per (transform, r) over a corpus, with APE vs the DCT.

    The exact DCT is added as baseline when missing. Results are ordered by
    transform (as given) then r, independent of ``jobs``.

    Raises:
        ValueError: If the corpus is empty.
    """
    if not images:
        raise ValueError("corpus_curves needs at least one image")
    records = list(transforms)
    if not any(r.is_exact for r in records):
        records.insert(0, exact_dct_record())
    r_values = [int(r) for r in r_range]
    baseline = next(r for r in records if r.is_exact).name

    tasks = [(rec, name, img) for rec in records for name, img in images]
    results: Dict[Tuple[str, str], List[ImageQuality]] = {}

    def run(task):
        rec, name, img = task
        return (rec.name, name), _evaluate_pair(rec, name, img, r_values, scale_before_retention, level_shift)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for i, (key, rows) in enumerate(pool.map(run, tasks), start=1):
                results[key] = rows
                if progress:
                    progress(i, len(tasks), f"{key[0]} on {key[1]}")
    else:
        for i, task in enumerate(tasks, start=1):
            key, rows = run(task)
            results[key] = rows
            if progress:
                progress(i, len(tasks), f"{key[0]} on {key[1]}")

    report = QualityReport([r.name for r in records], [n for n, _ in images], r_values)
    means: Dict[Tuple[str, int], Tuple[float, float]] = {}
    for rec in records:
        for idx, r in enumerate(r_values):
            rows = [results[(rec.name, name)][idx] for name, _ in images]
            report.per_image.extend(rows)
            means[(rec.name, r)] = (
                _mean_finite([q.psnr for q in rows]),
                float(np.mean([q.ssim for q in rows])),
            )
    for rec in records:
        for r in r_values:
            p, s = means[(rec.name, r)]
            bp, bs = means[(baseline, r)]
            report.curves.append(CurvePoint(rec.name, r, p, s, ape(p, bp), ape(s, bs)))
    return report


# -- Trend checks ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrendCheck:
    label: str
    status: str  # PASS, FAIL or SKIP
    detail: str = ""


# (leader, followers) orderings expected of corpus mean PSNR
EXPECTED_TRENDS: Tuple[Tuple[str, Tuple[str, ...]], ...] = (
    ("T7", ("T0", "T1", "T2", "T3", "T4", "T5", "T6", "T~1", "T~2", "T~3", "T~4")),
    ("T0", ("T1", "T2")),
    ("T4", ("T5", "T6")),
)


def trend_report(report: QualityReport) -> List[TrendCheck]:
    """Check the leader's mean PSNR is >= each follower's at every r."""
    checks: List[TrendCheck] = []
    present = set(report.transforms)
    for leader, followers in EXPECTED_TRENDS:
        others = [f for f in followers if f in present]
        label = f"{leader} >= {', '.join(followers)}"
        if leader not in present or not others:
            checks.append(TrendCheck(label, "SKIP", "transforms not in run"))
            continue
        lead = report.mean_psnr(leader)
        violations = [
            f"{other}@r={r}"
            for other in others
            for r, value in report.mean_psnr(other).items()
            if value > lead[r]
        ]
        if violations:
            shown = ", ".join(violations[:5])
            more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
            checks.append(TrendCheck(label, "FAIL", shown + more))
        else:
            checks.append(TrendCheck(label, "PASS"))
    return checks
