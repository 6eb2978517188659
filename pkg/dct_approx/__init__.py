"""Low-complexity integer approximations of the 8-point DCT.

Derives candidate matrices int(alpha * C) for ten integer functions,
classifies them exactly, builds their multiplierless fast algorithms and
measures them in a JPEG-like block codec.
"""

from .exact_dct import (
    N,
    GAMMA,
    GammaConstants,
    ExactDct,
    build_gamma_constants,
    build_exact_dct,
    dct_matrix,
    dct_2d,
    idct_2d,
)
from .integer_functions import (
    IntFuncKind,
    NEAREST_KINDS,
    STEP_KINDS,
    apply,
    apply_matrix,
    parse_kind,
)
from .matrix_lab import (
    DELTA_THRESHOLD,
    SingularMatrixError,
    ScalingDiagonal,
    InverseFactorization,
    gram,
    is_orthogonal,
    deviation_from_diagonality,
    within_delta_threshold,
    orthonormalize,
    normalized_transform,
    exact_inverse,
    factor_inverse_lowcomplexity,
    structured_matrix,
    extract_constants,
    has_dct_symmetry,
    row_scaling_between,
)
from .catalog import (
    ALIASES,
    CONSTANTS,
    named_matrix,
    resolve_name,
)
from .search import (
    Classification,
    AlphaPoint,
    AlphaInterval,
    Provenance,
    ApproximationRecord,
    alpha_range,
    breakpoints,
    evaluate,
    classify,
    sweep,
    merge_sweeps,
    full_catalog,
    exact_dct_record,
)
from .fast_transform import (
    Step,
    OpCounts,
    TransformPlan,
    factorization_matrices,
    k_matrix,
    build_plan,
    apply_plan,
    count_ops,
    max_intermediate,
)
from .image_io import (
    read_pgm,
    write_pgm,
    load_image,
)
from .codec import (
    RetentionSpec,
    BlockTransform,
    zigzag_order,
    forward_block,
    inverse_block,
    compress_image,
)
from .metrics import (
    PSNR_INF,
    QualityReport,
    psnr,
    ssim,
    ape,
    coding_gain,
    dct_proximity,
    corpus_curves,
    trend_report,
)
from .catalog_store import (
    CatalogFile,
    CatalogIntegrityError,
    save_catalog,
    load_catalog,
    resolve_record,
)

__all__ = [
    "N",
    "GAMMA",
    "GammaConstants",
    "ExactDct",
    "build_gamma_constants",
    "build_exact_dct",
    "dct_matrix",
    "dct_2d",
    "idct_2d",
    "IntFuncKind",
    "NEAREST_KINDS",
    "STEP_KINDS",
    "apply",
    "apply_matrix",
    "parse_kind",
    "DELTA_THRESHOLD",
    "SingularMatrixError",
    "ScalingDiagonal",
    "InverseFactorization",
    "gram",
    "is_orthogonal",
    "deviation_from_diagonality",
    "within_delta_threshold",
    "orthonormalize",
    "normalized_transform",
    "exact_inverse",
    "factor_inverse_lowcomplexity",
    "structured_matrix",
    "extract_constants",
    "has_dct_symmetry",
    "row_scaling_between",
    "ALIASES",
    "CONSTANTS",
    "named_matrix",
    "resolve_name",
    "Classification",
    "AlphaPoint",
    "AlphaInterval",
    "Provenance",
    "ApproximationRecord",
    "alpha_range",
    "breakpoints",
    "evaluate",
    "classify",
    "sweep",
    "merge_sweeps",
    "full_catalog",
    "exact_dct_record",
    "Step",
    "OpCounts",
    "TransformPlan",
    "factorization_matrices",
    "k_matrix",
    "build_plan",
    "apply_plan",
    "count_ops",
    "max_intermediate",
    "read_pgm",
    "write_pgm",
    "load_image",
    "RetentionSpec",
    "BlockTransform",
    "zigzag_order",
    "forward_block",
    "inverse_block",
    "compress_image",
    "PSNR_INF",
    "QualityReport",
    "psnr",
    "ssim",
    "ape",
    "coding_gain",
    "dct_proximity",
    "corpus_curves",
    "trend_report",
    "CatalogFile",
    "CatalogIntegrityError",
    "save_catalog",
    "load_catalog",
    "resolve_record",
]
