"""Tensor, manifest, and result-table I/O.

Activation tensors travel as NPY files (v1.0/v2.0 readable, v1.0 written):
the format is unambiguous and every major numerical ecosystem can produce
it. Only 4-D float32/float64 arrays are accepted; values are widened to
float64 on load and the layout normalized to C order, so downstream code
never sees mixed precisions or Fortran strides.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DtypeError,
    FormatError,
    ParseError,
    ShapeError,
    ValidationError,
)

NPY_MAGIC = b"\x93NUMPY"

RESULT_FIELDS = (
    "label",
    "condition",
    "trial",
    "seed",
    "s_equiv",
    "s_inv",
    "k_a",
    "k_a_prime",
    "r",
)


def validate_tensor(t) -> np.ndarray:
    """Check the (b, c, h, w) tensor contract and normalize the layout.

    Returns a C-contiguous float64 view or copy. Raises ShapeError for
    wrong dimensionality and ValidationError for non-finite entries,
    naming the first offending flat index.
    """
    arr = np.asarray(t)
    if arr.ndim != 4:
        raise ShapeError(f"expected a 4-D (b, c, h, w) tensor, got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise ShapeError(f"all tensor dims must be >= 1, got {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(arr.ravel()))
    if bad.size:
        raise ValidationError(f"non-finite value at flat index {int(bad[0])}")
    return arr


def read_tensor(path) -> np.ndarray:
    """Load a 4-D activation tensor from an NPY file.

    Accepts v1.0/v2.0 containers holding float32/float64 data in either
    C or Fortran order; both encodings of the same logical array load to
    identical tensors.
    """
    with open(path, "rb") as fh:
        magic = fh.read(len(NPY_MAGIC))
        if magic != NPY_MAGIC:
            raise FormatError(f"{path}: not an NPY file (magic bytes {magic!r})")
        fh.seek(0)
        try:
            arr = np.lib.format.read_array(fh, allow_pickle=False)
        except ValueError as exc:
            raise FormatError(f"{path}: malformed NPY container ({exc})") from exc
    if arr.ndim != 4:
        raise ShapeError(f"{path}: expected a 4-D (b, c, h, w) array, got ndim={arr.ndim}")
    if arr.dtype.kind != "f" or arr.dtype.itemsize not in (4, 8):
        raise DtypeError(f"{path}: unsupported dtype {arr.dtype}, need float32/float64")
    try:
        return validate_tensor(arr)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def write_tensor(t, path) -> None:
    """Write a tensor as NPY v1.0, 64-bit little-endian float, C order.

    read_tensor inverts this bit-exactly.
    """
    arr = np.ascontiguousarray(validate_tensor(t), dtype="<f8")
    with open(path, "wb") as fh:
        np.lib.format.write_array(fh, arr, version=(1, 0))


@dataclass(frozen=True)
class ManifestEntry:
    label: str
    ref_path: str
    alt_path: str


@dataclass(frozen=True)
class Manifest:
    """Ordered list of labelled (reference, alternate) tensor file pairs."""

    entries: tuple
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def load_manifest(path) -> Manifest:
    """Parse a JSON manifest: {"entries": [{"label", "ref", "alt"}, ...]}.

    File order is preserved. Duplicate labels are rejected so result rows
    stay unambiguous; an empty entries array is a valid (empty) manifest.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "entries" not in doc:
        raise ParseError(f"{path}: missing top-level 'entries' key")
    entries = []
    seen = set()
    for i, raw in enumerate(doc["entries"]):
        if not isinstance(raw, dict):
            raise ParseError(f"{path}: entry {i} is not an object")
        try:
            entry = ManifestEntry(
                label=str(raw["label"]),
                ref_path=str(raw["ref"]),
                alt_path=str(raw["alt"]),
            )
        except KeyError as exc:
            raise ParseError(f"{path}: entry {i} is missing key {exc}") from exc
        if entry.label in seen:
            raise ValidationError(f"{path}: duplicate label {entry.label!r}")
        seen.add(entry.label)
        entries.append(entry)
    metadata = doc.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError(f"{path}: 'metadata' must be an object")
    return Manifest(entries=tuple(entries), metadata=metadata)


@dataclass(frozen=True)
class ResultRow:
    """One scored pair: which data, which condition, and both scores."""

    label: str
    condition: str
    trial: int
    seed: int
    s_equiv: float
    s_inv: float
    k_a: int
    k_a_prime: int
    r: int

    def __post_init__(self):
        if not (0.0 <= self.s_equiv <= 1.0) or not (0.0 <= self.s_inv <= 1.0):
            raise ValidationError(
                f"scores must lie in [0, 1], got s_equiv={self.s_equiv} s_inv={self.s_inv}"
            )
        if self.r != min(self.k_a, self.k_a_prime):
            raise ValidationError(
                f"r={self.r} inconsistent with min(k_a={self.k_a}, k_a_prime={self.k_a_prime})"
            )


def _row_record(row: ResultRow) -> dict:
    return {
        "label": row.label,
        "condition": row.condition,
        "trial": row.trial,
        "seed": row.seed,
        "s_equiv": round(row.s_equiv, 6),
        "s_inv": round(row.s_inv, 6),
        "k_a": row.k_a,
        "k_a_prime": row.k_a_prime,
        "r": row.r,
    }


def write_results(rows, path, format="csv") -> None:
    """Serialize result rows as CSV (header + 6-decimal floats) or JSON.

    Output is byte-deterministic for a given row list, which is what makes
    repeated runs of the same seeded experiment directly diffable.
    """
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_FIELDS)
            for row in rows:
                writer.writerow(
                    [
                        row.label,
                        row.condition,
                        row.trial,
                        row.seed,
                        f"{row.s_equiv:.6f}",
                        f"{row.s_inv:.6f}",
                        row.k_a,
                        row.k_a_prime,
                        row.r,
                    ]
                )
    elif format == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump([_row_record(r) for r in rows], fh, indent=2)
            fh.write("\n")
    else:
        raise ValidationError(f"unknown result format {format!r}, expected 'csv' or 'json'")
