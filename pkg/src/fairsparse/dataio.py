"""CSV ingestion, real-data preprocessing, and dataset serialization.

Preprocessing mirrors the standard tabular pipeline for the regression
experiments: drop requested columns, drop predictors with missing
values, dummy-encode categoricals (one indicator per category beyond a
reference), and standardize every predictor and the target to zero mean
and unit sample standard deviation (denominator n-1).

Dataset CSV layout: UTF-8, header row, comma delimiter, response in the
first column followed by the predictors.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .synthgen import Dataset

MISSING_SENTINELS = ("?", "")


@dataclass(frozen=True)
class RawTable:
    columns: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]  # row-major strings

    @property
    def n_rows(self) -> int:
        return len(self.cells)

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def column(self, name: str) -> list[str]:
        try:
            idx = self.columns.index(name)
        except ValueError:
            raise ConfigError(f"no column named {name!r}") from None
        return [row[idx] for row in self.cells]


@dataclass(frozen=True)
class PreprocessOptions:
    target_column: str
    drop_missing_columns: bool = True
    dummy_encode: bool = True
    standardize: bool = True
    drop_columns: tuple[str, ...] = ()
    missing_sentinels: tuple[str, ...] = MISSING_SENTINELS
    categorical_overrides: tuple[str, ...] = ()


def load_csv(path) -> RawTable:
    """Read a comma-separated file with a header row into a RawTable.

    Ragged rows raise :class:`DataError` with the offending row index
    (0-based, counting data rows); duplicate header names raise as well.
    """
    try:
        with open(path, "r", encoding="utf-8-sig", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path} is empty")
    header = [name.strip() for name in rows[0]]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError(f"duplicate header names: {dupes}")
    width = len(header)
    cells = []
    for idx, row in enumerate(rows[1:]):
        if len(row) != width:
            raise DataError(
                f"ragged row {idx}: expected {width} fields, got {len(row)}"
            )
        cells.append(tuple(v.strip() for v in row))
    return RawTable(columns=tuple(header), cells=tuple(cells))


def _is_missing(value: str, sentinels) -> bool:
    return value in sentinels


def _parse_numeric(values, name: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in values])
    except ValueError as exc:
        raise DataError(f"column {name!r} is not numeric: {exc}") from exc


def preprocess(table: RawTable, opts: PreprocessOptions) -> tuple[Dataset, list[str]]:
    """Run the tabular pipeline; returns the dataset and the column map
    (output column index -> source name, dummies named "col=category").

    Constant columns cannot be standardized and are dropped with a
    warning. Categorical detection: any non-numeric cell (overridable).
    """
    if opts.target_column not in table.columns:
        raise ConfigError(f"target column {opts.target_column!r} not in table")
    unknown = [c for c in opts.drop_columns if c not in table.columns]
    if unknown:
        raise ConfigError(f"drop_columns not present: {unknown}")

    predictors = [c for c in table.columns
                  if c != opts.target_column and c not in set(opts.drop_columns)]

    target_vals = table.column(opts.target_column)
    if any(_is_missing(v, opts.missing_sentinels) for v in target_vals):
        raise DataError(f"target column {opts.target_column!r} has missing values")

    kept = []
    for name in predictors:
        vals = table.column(name)
        if opts.drop_missing_columns and any(
            _is_missing(v, opts.missing_sentinels) for v in vals
        ):
            continue
        kept.append((name, vals))

    columns: list[tuple[str, np.ndarray]] = []
    for name, vals in kept:
        categorical = name in set(opts.categorical_overrides) or any(
            not _looks_numeric(v) for v in vals
        )
        if categorical:
            if not opts.dummy_encode:
                raise DataError(
                    f"column {name!r} is categorical and dummy encoding is off"
                )
            categories = sorted(set(vals))
            for cat in categories[1:]:  # first category is the reference
                indicator = np.array([1.0 if v == cat else 0.0 for v in vals])
                columns.append((f"{name}={cat}", indicator))
        else:
            columns.append((name, _parse_numeric(vals, name)))

    y = _parse_numeric(target_vals, opts.target_column)
    if opts.standardize:
        y = _standardize(y, opts.target_column, required=True)
        standardized = []
        for name, col in columns:
            out = _standardize(col, name, required=False)
            if out is None:
                warnings.warn(f"dropping constant column {name!r} (zero std)")
                continue
            standardized.append((name, out))
        columns = standardized

    if not columns:
        raise DataError("no predictor columns survived preprocessing")
    X = np.column_stack([col for _, col in columns])
    return Dataset(X=X, y=y), [name for name, _ in columns]


def _looks_numeric(value: str) -> bool:
    try:
        float(value)
        return True
    except ValueError:
        return False


def _standardize(col: np.ndarray, name: str, required: bool):
    std = float(np.std(col, ddof=1))
    if std < 1e-12:
        if required:
            raise DataError(f"column {name!r} is constant; cannot standardize")
        return None
    return (col - float(np.mean(col))) / std


def write_dataset_csv(dataset: Dataset, path, feature_names=None) -> None:
    """Write a Dataset as CSV: response first, then predictors."""
    names = feature_names or [f"x{j}" for j in range(dataset.d)]
    if len(names) != dataset.d:
        raise ConfigError("feature name count does not match d")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["y"] + list(names)) + "\n")
        for i in range(dataset.n):
            row = [repr(float(dataset.y[i]))]
            row.extend(repr(float(v)) for v in dataset.X[i])
            fh.write(",".join(row) + "\n")


def read_dataset_csv(path) -> Dataset:
    """Read a Dataset written by :func:`write_dataset_csv` (response in
    the first column)."""
    table = load_csv(path)
    if table.n_cols < 2:
        raise DataError("dataset CSV needs a response and at least one predictor")
    data = np.array([[float(v) for v in row] for row in table.cells])
    if data.size == 0:
        raise DataError("dataset CSV has no rows")
    return Dataset(X=data[:, 1:], y=data[:, 0])


def write_column_map(names: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({str(i): name for i, name in enumerate(names)}, fh, indent=2)
        fh.write("\n")
