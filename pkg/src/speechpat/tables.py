"""Manifest and feature-table CSV files."""

import csv
from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from .errors import DataError, DuplicateId, IdMismatch, ManifestError
from .evaluation import LabeledDataset
from .features import FEATURE_NAMES

MANIFEST_HEADER = ["id", "path", "label", "score"]


@dataclass(frozen=True)
class ManifestRow:
    id: str
    path: Path
    label: int
    score: float


def read_manifest(path):
    """Parse ``id,path,label,score``; relative paths resolve against the manifest's folder."""
    path = Path(path)
    base = path.parent
    rows, seen = [], set()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise ManifestError(f"{path}: header must be {','.join(MANIFEST_HEADER)}, got {header}")
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 4:
                raise ManifestError(f"{path}:{lineno}: expected 4 fields, got {len(rec)}")
            rid, rpath, label, score = rec
            if rid in seen:
                raise DuplicateId(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            if label not in ("0", "1"):
                raise ManifestError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
            try:
                score_val = float(score)
            except ValueError:
                raise ManifestError(f"{path}:{lineno}: score {score!r} is not a number") from None
            if not 0.0 <= score_val <= 1.0:
                raise ManifestError(f"{path}:{lineno}: score {score_val} outside [0, 1]")
            p = Path(rpath)
            rows.append(ManifestRow(rid, p if p.is_absolute() else base / p, int(label), score_val))
    return rows


def write_manifest(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_HEADER)
        for r in rows:
            w.writerow([r.id, str(r.path), r.label, repr(r.score)])


def format_value(v):
    return format(float(v), ".17g")


def write_features(path, ids, matrix, names=FEATURE_NAMES):
    matrix = np.asarray(matrix, dtype=np.float64).reshape(len(ids), len(names))
    if not np.all(np.isfinite(matrix)):
        raise DataError("feature table holds non-finite values")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", *names])
        for rid, row in zip(ids, matrix):
            w.writerow([rid, *map(format_value, row)])


def read_features(path):
    """Return ``(ids, matrix, names)``; the header must be the canonical schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[0] != "id" or header[1:] != list(FEATURE_NAMES):
            raise DataError(f"{path}: header does not match the feature schema")
        ids, rows = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise DataError(f"{path}:{lineno}: expected {len(header)} fields")
            try:
                values = [float(v) for v in rec[1:]]
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise DataError(f"{path}:{lineno}: non-finite value")
            ids.append(rec[0])
            rows.append(values)
    if len(set(ids)) != len(ids):
        raise DuplicateId(f"{path}: duplicate ids")
    return ids, np.array(rows, dtype=np.float64).reshape(len(ids), len(FEATURE_NAMES)), list(FEATURE_NAMES)


def join_dataset(features_path, manifest_path):
    """Feature rows reordered to manifest order; ids must match exactly."""
    ids, matrix, names = read_features(features_path)
    manifest = read_manifest(manifest_path)
    by_id = {rid: i for i, rid in enumerate(ids)}
    m_ids = [r.id for r in manifest]
    if set(m_ids) != set(ids):
        only_f = sorted(set(ids) - set(m_ids))
        only_m = sorted(set(m_ids) - set(ids))
        raise IdMismatch(f"ids differ: only in features {only_f[:5]}, only in manifest {only_m[:5]}")
    order = [by_id[rid] for rid in m_ids]
    return LabeledDataset(
        ids=m_ids, X=matrix[order], labels=[r.label for r in manifest],
        scores=[r.score for r in manifest], feature_names=names,
    )
