"""LIBSVM-format ingestion and trace serialization.

The sparse text records are materialized densely (the solvers use dense
algebra and the datasets run at desk scale) and the feature values are
used exactly as written: no scaling, centering or normalization.

Trace CSVs carry the exact header ``grad_evals,event,f_value,f_gap,fallback``
with floats printed as their shortest round-trip decimal, so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .schemes import ConvergenceTrace

TRACE_HEADER = "grad_evals,event,f_value,f_gap,fallback"

#: Dense materialization cap; indices beyond this are rejected as malformed.
MAX_FEATURE_INDEX = 100_000_000


class LibsvmParseError(ValueError):
    """Malformed LIBSVM record; carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class LibsvmDataset:
    """Dense view of a LIBSVM file: one row per sample."""

    features: np.ndarray  # m x n
    labels: np.ndarray    # m

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def parse_libsvm(source) -> LibsvmDataset:
    """Parse ``label idx:val ...`` records from a stream or string.

    Comment lines (leading ``#``) and blank lines are skipped.  Feature
    indices are 1-based in the text and mapped to 0-based columns; absent
    indices are zero.  Any malformed token, nonpositive index, duplicate
    index, or non-finite label raises :class:`LibsvmParseError` with the
    offending line number.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = source
    rows: list[tuple[float, dict[int, float]]] = []
    max_index = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise LibsvmParseError(lineno, f"bad label {tokens[0]!r}") from None
        if not np.isfinite(label):
            raise LibsvmParseError(lineno, f"non-finite label {tokens[0]!r}")
        entries: dict[int, float] = {}
        for token in tokens[1:]:
            index_text, sep, value_text = token.partition(":")
            if not sep:
                raise LibsvmParseError(lineno, f"expected idx:val, got {token!r}")
            try:
                index = int(index_text)
            except ValueError:
                raise LibsvmParseError(lineno, f"bad feature index {index_text!r}") from None
            if index < 1:
                raise LibsvmParseError(lineno, f"feature index must be >= 1, got {index}")
            if index > MAX_FEATURE_INDEX:
                raise LibsvmParseError(
                    lineno, f"feature index {index} too large to materialize densely")
            try:
                value = float(value_text)
            except ValueError:
                raise LibsvmParseError(lineno, f"bad feature value {value_text!r}") from None
            if index in entries:
                raise LibsvmParseError(lineno, f"duplicate feature index {index}")
            entries[index] = value
            max_index = max(max_index, index)
        rows.append((label, entries))

    features = np.zeros((len(rows), max_index))
    labels = np.zeros(len(rows))
    for i, (label, entries) in enumerate(rows):
        labels[i] = label
        for index, value in entries.items():
            features[i, index - 1] = value
    return LibsvmDataset(features, labels)


def load_libsvm(path) -> LibsvmDataset:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_libsvm(handle)


def format_libsvm(dataset: LibsvmDataset) -> str:
    """Render a dataset back to LIBSVM text (zeros omitted).

    Values print as shortest round-trip decimals, so
    parse -> format -> parse reproduces the dataset bit for bit.
    """
    lines = []
    for i in range(dataset.n_samples):
        parts = [repr(float(dataset.labels[i]))]
        row = dataset.features[i]
        for j in np.nonzero(row)[0]:
            parts.append(f"{j + 1}:{float(row[j])!r}")
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def write_libsvm(dataset: LibsvmDataset, path) -> None:
    Path(path).write_text(format_libsvm(dataset), encoding="utf-8")


def _format_float(v: float) -> str:
    return repr(float(v))


def write_trace(trace: ConvergenceTrace, path) -> None:
    """Serialize a trace to CSV, one row per event, order preserved."""
    if not trace.events:
        raise ValueError("refusing to write an empty trace")
    lines = [TRACE_HEADER]
    for e in trace.events:
        lines.append(
            f"{e.grad_evals},{e.kind},{_format_float(e.f_value)},"
            f"{_format_float(e.f_gap)},{'true' if e.fallback else 'false'}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class TraceRow:
    grad_evals: int
    event: str
    f_value: float
    f_gap: float
    fallback: bool


def read_trace(path) -> list[TraceRow]:
    """Read a trace CSV produced by :func:`write_trace`."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != TRACE_HEADER:
        raise ValueError(f"{path}: not a trace CSV (bad header)")
    rows = []
    for ln in lines[1:]:
        evals, kind, f_value, f_gap, fallback = ln.split(",")
        rows.append(TraceRow(int(evals), kind, float(f_value), float(f_gap),
                             fallback == "true"))
    return rows


def write_summary(entries: list[dict], path) -> None:
    """JSON summary of a multi-method comparison."""
    Path(path).write_text(json.dumps(entries, indent=2) + "\n", encoding="utf-8")
