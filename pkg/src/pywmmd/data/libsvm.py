"""LIBSVM / svmlight text format.

Each line is ``<label> <index>:<value> ...`` with 1-based, strictly sparse
indices. ``#`` starts a comment. Unlisted entries are zero.

Training files for PU learning label positives ``+1`` and unlabeled rows ``0``.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Iterable
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import pandas as pd
import structlog

from pywmmd.domain.types import FloatArray, LabeledDataset, PUDataset
from pywmmd.errors import InvalidInputError, LibsvmParseError

logger = structlog.get_logger(__name__)

POSITIVE_LABELS: frozenset[float] = frozenset({1.0})
UNLABELED_LABEL = 0.0


@dataclass(frozen=True, slots=True, eq=False)
class LibsvmRows:
    labels: FloatArray
    features: FloatArray

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])


def _parse_number(token: str, line_no: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise LibsvmParseError(line_no, f"malformed {what} {token!r}") from None
    if not math.isfinite(value):
        raise LibsvmParseError(line_no, f"non-finite {what} {token!r}")
    return value


def read_libsvm_rows(stream: Iterable[str], n_features: int | None = None) -> LibsvmRows:
    """Parse raw labels and a dense feature matrix, preserving line order."""
    if n_features is not None and n_features < 0:
        raise InvalidInputError("n_features must be >= 0")
    labels: list[float] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    max_index = 0

    for line_no, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        labels.append(_parse_number(tokens[0], line_no, "label"))
        row = len(labels) - 1
        seen: set[int] = set()
        for token in tokens[1:]:
            idx_text, sep, val_text = token.partition(":")
            if not sep or not idx_text or not val_text:
                raise LibsvmParseError(line_no, f"malformed token {token!r}")
            try:
                idx = int(idx_text)
            except ValueError:
                raise LibsvmParseError(line_no, f"malformed index {idx_text!r}") from None
            if idx <= 0:
                raise LibsvmParseError(line_no, f"feature index must be >= 1, got {idx}")
            if idx in seen:
                raise LibsvmParseError(line_no, f"duplicate index {idx}")
            if n_features is not None and idx > n_features:
                raise LibsvmParseError(
                    line_no, f"index {idx} exceeds the declared dimension {n_features}"
                )
            seen.add(idx)
            rows.append(row)
            cols.append(idx - 1)
            vals.append(_parse_number(val_text, line_no, "value"))
            max_index = max(max_index, idx)

    dim = n_features if n_features is not None else max_index
    features = np.zeros((len(labels), dim), dtype=np.float64)
    if vals:
        features[np.asarray(rows), np.asarray(cols)] = np.asarray(vals)
    logger.debug("Parsed LIBSVM rows", rows=len(labels), dim=dim, nonzeros=len(vals))
    return LibsvmRows(labels=np.asarray(labels, dtype=np.float64), features=features)


def parse_libsvm(
    stream: Iterable[str],
    positive_labels: Collection[float] = POSITIVE_LABELS,
    n_features: int | None = None,
    name: str = "",
) -> LabeledDataset:
    """Labeled dataset with labels mapped to +1 (in ``positive_labels``) or -1."""
    parsed = read_libsvm_rows(stream, n_features)
    positive = np.isin(parsed.labels, np.asarray(sorted(positive_labels), dtype=np.float64))
    return LabeledDataset(
        features=parsed.features,
        labels=np.where(positive, 1, -1),
        name=name,
    )


def parse_pu_libsvm(
    stream: Iterable[str],
    n_features: int | None = None,
    pi_plus: float | None = None,
) -> PUDataset:
    """PU training file: label +1 marks X_p, label 0 marks X_u."""
    parsed = read_libsvm_rows(stream, n_features)
    is_pos = parsed.labels == 1.0
    is_unl = parsed.labels == UNLABELED_LABEL
    bad = np.flatnonzero(~(is_pos | is_unl))
    if bad.size:
        raise InvalidInputError(
            f"PU training files use labels +1 and 0; found {parsed.labels[bad[0]]:g} "
            f"in data row {int(bad[0]) + 1}"
        )
    return PUDataset(
        positives=parsed.features[is_pos],
        unlabeled=parsed.features[is_unl],
        pi_plus=pi_plus,
    )


def _format_row(label: str, row: FloatArray) -> str:
    entries = [f"{j + 1}:{float(row[j])!r}" for j in np.flatnonzero(row)]
    return " ".join([label, *entries])


def serialize_libsvm(data: LabeledDataset, stream: TextIO) -> None:
    for label, row in zip(data.labels, data.features, strict=True):
        stream.write(_format_row("+1" if label == 1 else "-1", row) + "\n")


def serialize_pu_libsvm(data: PUDataset, stream: TextIO) -> None:
    for row in data.positives:
        stream.write(_format_row("+1", row) + "\n")
    for row in data.unlabeled:
        stream.write(_format_row("0", row) + "\n")


def write_csv(data: LabeledDataset, stream: TextIO) -> None:
    """Dense dump with header ``label,f1,...,fd``."""
    frame = pd.DataFrame(data.features, columns=[f"f{j + 1}" for j in range(data.dim)])
    frame.insert(0, "label", data.labels)
    frame.to_csv(stream, index=False, lineterminator="\n")
