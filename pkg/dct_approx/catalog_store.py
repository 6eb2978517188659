"""JSON persistence for the approximation catalog.

Loading never trusts stored derived values: gram diagonal, deviation,
classification, scaling, inverse and operation counts are recomputed from
each stored matrix and compared. See docs/CATALOG_FORMAT.md for the schema.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .catalog import resolve_name
from .fast_transform import build_plan
from .integer_functions import parse_kind
from .matrix_lab import (
    InverseFactorization,
    ScalingDiagonal,
    format_rational,
    parse_rational,
)
from .search import (
    AlphaInterval,
    AlphaPoint,
    ApproximationRecord,
    Classification,
    Provenance,
    classify,
)

# -- File format -------------------------------------------------------------------
CATALOG_VERSION = "1.0.0"
DEFAULT_CATALOG_NAME = "catalog.json"
CATALOG_ENV = "DCTLAB_CATALOG"
DELTA_RECHECK_TOLERANCE = 1e-9


class CatalogIntegrityError(ValueError):
    """Stored values disagree with values recomputed from the stored matrix."""


@dataclass
class CatalogFile:
    version: str
    generated_at: str
    records: List[ApproximationRecord]
    plans: Dict[str, dict] = field(default_factory=dict)

    def record(self, selector: str) -> ApproximationRecord:
        return resolve_record(self, selector)

    @property
    def accepted(self) -> List[ApproximationRecord]:
        return [r for r in self.records if r.is_accepted]


def default_catalog_path(explicit: Optional[str] = None) -> Path:
    """--catalog flag, then $DCTLAB_CATALOG, then ./catalog.json."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(CATALOG_ENV)
    if env:
        return Path(env)
    return Path(DEFAULT_CATALOG_NAME)


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for reproducible files
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return moment.replace(microsecond=0).isoformat()


# -- Encoding ---------------------------------------------------------------------------

def _interval_to_dict(interval: Optional[AlphaInterval]) -> Optional[dict]:
    if interval is None:
        return None
    return {
        "lo_symbol": interval.lo.symbol(unicode=False),
        "hi_symbol": interval.hi.symbol(unicode=False),
        "lo": interval.lo.value,
        "hi": interval.hi.value,
        "lo_closed": interval.lo_closed,
        "hi_closed": interval.hi_closed,
    }


def record_to_dict(record: ApproximationRecord) -> dict:
    inverse = None
    if record.inverse_factorization is not None:
        inverse = {
            "matrix": record.inverse_factorization.factor.tolist(),
            "diagonal": [format_rational(v) for v in record.inverse_factorization.diagonal],
        }
    return {
        "name": record.name,
        "alias": record.known_alias,
        "function": record.source_function.value if record.source_function else None,
        "interval": _interval_to_dict(record.alpha),
        "matrix": record.matrix.tolist() if record.matrix is not None else None,
        "classification": record.classification.value,
        "delta": record.delta,
        "diag_gram": list(record.gram_diagonal) if record.matrix is not None else None,
        "scaling": [format_rational(v) for v in record.scaling.d_squared] if record.scaling else None,
        "inverse": inverse,
        "provenance": [
            {"function": p.function.value, "interval": _interval_to_dict(p.interval)}
            for p in record.provenance
        ],
        "equivalent_to": record.equivalent_to,
        "rejection_reason": record.rejection_reason,
    }


def save_catalog(
    records: Sequence[ApproximationRecord],
    path,
    generated_at: Optional[str] = None,
) -> Path:
    """Write records and the plans of accepted transforms, atomically.

    The file is written to a temporary sibling and renamed over ``path``.
    """
    names = [r.name for r in records]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ValueError(f"Record names must be unique, duplicated: {duplicates}")

    plans = {r.name: build_plan(r).to_dict() for r in records if r.is_accepted}
    payload = {
        "version": CATALOG_VERSION,
        "generated_at": generated_at or _timestamp(),
        "records": [record_to_dict(r) for r in records],
        "plans": plans,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(json.dumps(payload, indent=2))
            f.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# -- Decoding ---------------------------------------------------------------------------

def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict):
        raise ValueError(f"Catalog schema violation: {where} must be an object, got {type(obj).__name__}")
    if key not in obj:
        raise ValueError(f"Catalog schema violation: {where} lacks field {key!r}")
    return obj[key]


def _interval_from_dict(data: Optional[dict], where: str) -> Optional[AlphaInterval]:
    if data is None:
        return None
    try:
        return AlphaInterval(
            lo=AlphaPoint.parse(_require(data, "lo_symbol", where)),
            hi=AlphaPoint.parse(_require(data, "hi_symbol", where)),
            lo_closed=bool(_require(data, "lo_closed", where)),
            hi_closed=bool(_require(data, "hi_closed", where)),
        )
    except (TypeError, AttributeError) as e:
        raise ValueError(f"Catalog schema violation: bad interval in {where}: {e}")


def record_from_dict(data: dict) -> ApproximationRecord:
    """Parse one record and re-check it against its matrix.

    Raises:
        ValueError: On schema violations.
        CatalogIntegrityError: When stored and recomputed values differ.
    """
    if not isinstance(data, dict):
        raise ValueError(f"Catalog schema violation: record must be an object, got {type(data).__name__}")
    name = _require(data, "name", "record")
    where = f"record {name!r}"
    try:
        classification = Classification(_require(data, "classification", where))
    except ValueError:
        raise ValueError(f"Catalog schema violation: {where} has unknown classification {data['classification']!r}")

    function = data.get("function")
    matrix_data = _require(data, "matrix", where)
    inverse_data = data.get("inverse")
    scaling_data = data.get("scaling")
    record = ApproximationRecord(
        name=name,
        matrix=None if matrix_data is None else np.array(matrix_data, dtype=np.int64),
        source_function=parse_kind(function) if function else None,
        alpha=_interval_from_dict(data.get("interval"), where),
        classification=classification,
        delta=data.get("delta"),
        scaling=None if scaling_data is None else ScalingDiagonal(
            tuple(parse_rational(v) for v in scaling_data)
        ),
        inverse_factorization=None if inverse_data is None else InverseFactorization(
            factor=np.array(_require(inverse_data, "matrix", f"{where} inverse"), dtype=np.int64),
            diagonal=tuple(parse_rational(v) for v in _require(inverse_data, "diagonal", f"{where} inverse")),
        ),
        known_alias=data.get("alias"),
        provenance=tuple(
            Provenance(
                parse_kind(_require(p, "function", f"{where} provenance")),
                _interval_from_dict(_require(p, "interval", f"{where} provenance"), where),
            )
            for p in data.get("provenance", [])
        ),
        equivalent_to=data.get("equivalent_to"),
        rejection_reason=data.get("rejection_reason"),
    )
    if record.matrix is not None and record.matrix.shape != (8, 8):
        raise ValueError(f"Catalog schema violation: {where} matrix has shape {record.matrix.shape}")
    _recheck(record, data.get("diag_gram"))
    return record


def _recheck(record: ApproximationRecord, stored_diag: Optional[list]) -> None:
    where = f"record {record.name!r}"
    if record.matrix is None:
        if record.classification is not Classification.EXACT:
            raise CatalogIntegrityError(f"{where} has no matrix but is {record.classification.value}")
        return

    if stored_diag is not None and tuple(stored_diag) != record.gram_diagonal:
        raise CatalogIntegrityError(
            f"{where}: stored gram diagonal {tuple(stored_diag)} != recomputed {record.gram_diagonal}"
        )
    verdict = classify(record.matrix)
    if verdict.classification is not record.classification:
        raise CatalogIntegrityError(
            f"{where}: stored classification {record.classification.value} != "
            f"recomputed {verdict.classification.value}"
        )
    if (record.delta is None) != (verdict.delta is None) or (
        record.delta is not None
        and not math.isclose(record.delta, verdict.delta, abs_tol=DELTA_RECHECK_TOLERANCE)
    ):
        raise CatalogIntegrityError(f"{where}: stored delta {record.delta} != recomputed {verdict.delta}")
    if record.scaling != verdict.scaling:
        raise CatalogIntegrityError(f"{where}: stored scaling does not match the matrix")
    stored_inv = record.inverse_factorization
    fresh_inv = verdict.inverse_factorization
    if (stored_inv is None) != (fresh_inv is None) or (
        stored_inv is not None
        and (not np.array_equal(stored_inv.factor, fresh_inv.factor) or stored_inv.diagonal != fresh_inv.diagonal)
    ):
        raise CatalogIntegrityError(f"{where}: stored inverse factorization does not match the matrix")


def load_catalog(path) -> CatalogFile:
    """Read and verify a catalog file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: On malformed JSON or schema violations.
        CatalogIntegrityError: If any stored value fails the recheck.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not valid JSON ({e})")
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: catalog root must be an object")
    version = _require(payload, "version", "catalog")
    if not isinstance(version, str):
        raise ValueError(f"Catalog schema violation: version must be a string, got {version!r}")
    if version.split(".")[0] != CATALOG_VERSION.split(".")[0]:
        raise ValueError(f"Unsupported catalog version {version}; expected {CATALOG_VERSION}")

    records = [record_from_dict(r) for r in _require(payload, "records", "catalog")]
    names = [r.name for r in records]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: record names are not unique")

    plans = payload.get("plans", {})
    for record in records:
        if not record.is_accepted:
            continue
        fresh = build_plan(record).to_dict()
        stored = plans.get(record.name)
        if stored is not None and stored.get("counts") != fresh["counts"]:
            raise CatalogIntegrityError(
                f"record {record.name!r}: stored operation counts {stored.get('counts')} "
                f"!= recomputed {fresh['counts']}"
            )
    return CatalogFile(version, payload.get("generated_at", ""), records, plans)


def resolve_record(catalog, selector: str) -> ApproximationRecord:
    """Find a record by canonical name, alias or raw record name.

    Raises:
        KeyError: If nothing matches.
    """
    records = catalog.records if isinstance(catalog, CatalogFile) else list(catalog)
    by_name = {r.name: r for r in records}
    if selector in by_name:
        return by_name[selector]
    canonical = resolve_name(selector)
    if canonical in by_name:
        return by_name[canonical]
    raise KeyError(f"Transform {selector!r} ({canonical}) is not in the catalog")
