"""CSV ingestion/serialization and grid-file parsing.

Dataset schema: header ``time,event,<feature names...>`` with one row per
subject; a trailing ``true_time`` column (written by the simulator) is
carried through reads but ignored by fitting code. All floats are written
with ``repr`` so round-trips are exact.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import CsvFormatError, InvalidInputError
from .survival import Dataset
from .tune import HyperGrid

TRUTH_COLUMN = "true_time"


def _fmt(v: float) -> str:
    return repr(float(v))


def read_dataset(path) -> tuple[Dataset, np.ndarray | None]:
    """Parse a dataset CSV; returns (dataset, true_times or None)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise CsvFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "time" or header[1] != "event":
        raise CsvFormatError(f"{path}: line 1: header must start with 'time,event'")
    has_truth = bool(header) and header[-1] == TRUTH_COLUMN
    feature_names = header[2:-1] if has_truth else header[2:]

    times, events, covs, truths = [], [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(header):
            raise CsvFormatError(
                f"{path}: line {lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise CsvFormatError(f"{path}: line {lineno}: non-numeric cell") from None
        t, d = values[0], values[1]
        if t <= 0:
            raise CsvFormatError(f"{path}: line {lineno}: time must be positive")
        if d not in (0.0, 1.0):
            raise CsvFormatError(f"{path}: line {lineno}: event must be 0 or 1")
        times.append(t)
        events.append(int(d))
        if has_truth:
            covs.append(values[2:-1])
            truths.append(values[-1])
        else:
            covs.append(values[2:])
    if not times:
        raise CsvFormatError(f"{path}: no data rows")
    dataset = Dataset(times=np.array(times), events=np.array(events),
                      covariates=np.array(covs).reshape(len(times), len(feature_names)),
                      feature_names=tuple(feature_names))
    return dataset, (np.array(truths) if has_truth else None)


def write_dataset(path, data: Dataset, truth=None) -> None:
    header = ["time", "event", *data.feature_names]
    if truth is not None:
        truth = np.asarray(truth, dtype=float)
        if truth.shape != (data.n,):
            raise InvalidInputError("truth length mismatch")
        header.append(TRUTH_COLUMN)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(data.n):
            row = [_fmt(data.times[i]), int(data.events[i]),
                   *(_fmt(v) for v in data.covariates[i])]
            if truth is not None:
                row.append(_fmt(truth[i]))
            writer.writerow(row)


def write_predictions(path, preds, intervals=None) -> None:
    """Predictions CSV: `pred` or `pred,lower,upper`, row-aligned with input."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if intervals is None:
            writer.writerow(["pred"])
            for p in preds:
                writer.writerow([_fmt(p)])
        else:
            writer.writerow(["pred", "lower", "upper"])
            for p, iv in zip(preds, intervals):
                writer.writerow([_fmt(p), _fmt(iv.lower), _fmt(iv.upper)])


GRID_KEYS = {
    "layers": ("layers", int),
    "nodes": ("nodes", int),
    "activation": ("activation", str),
    "optimizer": ("optimizer", str),
    "dropout": ("dropout_rate", float),
    "epochs": ("epochs", int),
    "batch": ("batch_size", int),
}


def read_grid_file(path) -> HyperGrid:
    """Flat `key=v1,v2,...` lines; keys: layers, nodes, activation,
    optimizer, dropout, epochs, batch. Missing keys keep defaults."""
    overrides = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}: line {lineno}: expected key=values")
            key, _, rest = line.partition("=")
            key = key.strip()
            if key not in GRID_KEYS:
                raise InvalidInputError(f"{path}: line {lineno}: unknown key {key!r}")
            field_name, cast = GRID_KEYS[key]
            try:
                overrides[field_name] = tuple(cast(v.strip())
                                              for v in rest.split(",") if v.strip())
            except ValueError:
                raise InvalidInputError(
                    f"{path}: line {lineno}: bad value for {key!r}") from None
    return HyperGrid(**overrides)
