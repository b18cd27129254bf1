"""Measurement-matrix ingestion and per-subject normalization.

The expected on-disk layout is a tab-separated matrix file (header row of
subject identifiers, one leading feature-identifier column) plus a two-column
labels file mapping each subject to a group tag. Missing values are not
supported; a blank or non-numeric cell is a parse error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from dfdr.errors import ParseError, PreprocessingError, ValidationError


@dataclass(frozen=True)
class DataMatrix:
    """Feature-by-subject measurement matrix with group labels.

    ``values`` has shape (n_features, n_subjects); ``labels[j]`` is the group
    tag of subject ``j``. Feature and subject identifiers must be unique.
    """

    values: np.ndarray
    feature_ids: tuple[str, ...]
    subject_ids: tuple[str, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValidationError("matrix values must be two-dimensional")
        m, n = values.shape
        if m < 1:
            raise ValidationError("matrix needs at least one feature row")
        if n < 2:
            raise ValidationError("matrix needs at least two subject columns")
        if len(self.feature_ids) != m:
            raise ValidationError(
                f"{len(self.feature_ids)} feature ids for {m} rows"
            )
        if len(self.subject_ids) != n or len(self.labels) != n:
            raise ValidationError(
                f"{len(self.subject_ids)} subject ids / {len(self.labels)} labels "
                f"for {n} columns"
            )
        dup = _first_duplicate(self.feature_ids)
        if dup is not None:
            raise ValidationError(f"duplicate feature id {dup!r}")
        dup = _first_duplicate(self.subject_ids)
        if dup is not None:
            raise ValidationError(f"duplicate subject id {dup!r}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("matrix contains non-finite values")

    @property
    def n_features(self) -> int:
        return self.values.shape[0]

    @property
    def n_subjects(self) -> int:
        return self.values.shape[1]

    def groups(self) -> dict[str, tuple[int, ...]]:
        """Column indices per group tag, in order of first appearance."""
        out: dict[str, list[int]] = {}
        for j, tag in enumerate(self.labels):
            out.setdefault(tag, []).append(j)
        return {tag: tuple(cols) for tag, cols in out.items()}

    def group_columns(self, tag: str) -> np.ndarray:
        cols = [j for j, label in enumerate(self.labels) if label == tag]
        if not cols:
            raise ValidationError(f"group {tag!r} not present in labels")
        return np.asarray(cols, dtype=np.intp)

    def select_features(self, indices) -> "DataMatrix":
        """New matrix restricted to the given feature rows (order preserved)."""
        idx = np.asarray(indices, dtype=np.intp)
        return DataMatrix(
            values=self.values[idx],
            feature_ids=tuple(self.feature_ids[i] for i in idx),
            subject_ids=self.subject_ids,
            labels=self.labels,
        )


def load_labels(path) -> dict[str, str]:
    """Read a two-column (subject id, group tag) tab-separated file."""
    labels: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"{path}: row {lineno}: expected 2 tab-separated fields, "
                f"got {len(fields)}"
            )
        subject, tag = fields[0].strip(), fields[1].strip()
        if not subject or not tag:
            raise ParseError(f"{path}: row {lineno}: empty subject id or group tag")
        if subject in labels:
            raise ValidationError(f"{path}: duplicate subject id {subject!r}")
        labels[subject] = tag
    if not labels:
        raise ParseError(f"{path}: no label rows found")
    return labels


def load_matrix(matrix_path, labels_path) -> DataMatrix:
    """Read a tab-separated measurement matrix plus its labels file.

    The matrix header row carries subject identifiers (its first cell is
    ignored); every following row is a feature identifier and one numeric
    value per subject. Every subject must appear in the labels file; label
    entries for unknown subjects are ignored.
    """
    label_map = load_labels(labels_path)
    text = Path(matrix_path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if len(lines) < 2:
        raise ParseError(f"{matrix_path}: need a header row and at least one feature row")

    header = lines[0].rstrip("\n").split("\t")
    subject_ids = [cell.strip() for cell in header[1:]]
    if len(subject_ids) < 2:
        raise ParseError(f"{matrix_path}: header row names fewer than two subjects")
    n = len(subject_ids)

    feature_ids: list[str] = []
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.rstrip("\n").split("\t")
        if len(fields) != n + 1:
            raise ParseError(
                f"{matrix_path}: row {lineno}: expected {n + 1} fields, "
                f"got {len(fields)}"
            )
        feature_ids.append(fields[0].strip())
        row = []
        for col, cell in enumerate(fields[1:], start=2):
            cell = cell.strip()
            if not cell or cell.upper() in ("NA", "NAN"):
                raise ParseError(
                    f"{matrix_path}: row {lineno}, column {col}: missing value"
                )
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{matrix_path}: row {lineno}, column {col}: "
                    f"non-numeric cell {cell!r}"
                ) from None
            if not math.isfinite(value):
                raise ParseError(
                    f"{matrix_path}: row {lineno}, column {col}: "
                    f"non-finite cell {cell!r}"
                )
            row.append(value)
        rows.append(row)

    missing = [s for s in subject_ids if s not in label_map]
    if missing:
        raise ValidationError(
            f"{labels_path}: no group label for subject {missing[0]!r}"
        )
    return DataMatrix(
        values=np.asarray(rows, dtype=float),
        feature_ids=tuple(feature_ids),
        subject_ids=tuple(subject_ids),
        labels=tuple(label_map[s] for s in subject_ids),
    )


def signed_log1p(x):
    """Odd transform sign(x) * ln(1 + |x|), defined as 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.log1p(np.abs(x))


def preprocess(matrix: DataMatrix) -> DataMatrix:
    """Normalize each subject column by its median, then apply signed_log1p.

    A column whose median is exactly zero cannot be normalized and raises
    PreprocessingError naming the subject. Negative medians are allowed.
    """
    medians = np.median(matrix.values, axis=0)
    zero = np.flatnonzero(medians == 0.0)
    if zero.size:
        raise PreprocessingError(
            f"subject {matrix.subject_ids[zero[0]]!r} has zero column median"
        )
    normalized = matrix.values / medians
    return DataMatrix(
        values=signed_log1p(normalized),
        feature_ids=matrix.feature_ids,
        subject_ids=matrix.subject_ids,
        labels=matrix.labels,
    )


def _first_duplicate(items) -> str | None:
    seen = set()
    for item in items:
        if item in seen:
            return item
        seen.add(item)
    return None
