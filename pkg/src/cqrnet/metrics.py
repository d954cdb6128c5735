"""Survival-aware evaluation: C-index, MMSE over event rows, and the
capped IPCW quantile loss."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, UndefinedMetricError
from .loss import check
from .survival import Dataset, ipcw_weights, km_censoring_estimate


@dataclass(frozen=True)
class MetricsReport:
    c_index: float
    mmse: float
    quantile_loss: float
    n_comparable_pairs: int
    n_events: int
    tau: float
    cap_u: float

    FIELD_ORDER = ("c_index", "mmse", "quantile_loss", "n_comparable_pairs",
                   "n_events", "tau", "cap_u")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.FIELD_ORDER)
            writer.writerow([repr(float(getattr(self, f)))
                             if f in ("c_index", "mmse", "quantile_loss", "tau", "cap_u")
                             else getattr(self, f)
                             for f in self.FIELD_ORDER])


def _match_length(data: Dataset, values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape != (data.n,):
        raise InvalidInputError(f"expected {data.n} predictions, got shape {v.shape}")
    return v


def c_index(data: Dataset, preds) -> tuple[float, int]:
    """Concordance over comparable pairs (Y_i < Y_j, delta_i = 1).

    Prediction ties count 0.5; tied observed times are not comparable.
    """
    q = _match_length(data, preds)
    y = data.times
    comparable = (y[:, None] < y[None, :]) & (data.events[:, None] == 1)
    n_comparable = int(comparable.sum())
    if n_comparable == 0:
        raise UndefinedMetricError("no comparable pairs")
    concordant = (q[:, None] < q[None, :]) & comparable
    tied = (q[:, None] == q[None, :]) & comparable
    value = (concordant.sum() + 0.5 * tied.sum()) / n_comparable
    return float(value), n_comparable


def mmse(data: Dataset, log_preds) -> float:
    """Mean squared log-scale residual over event observations only."""
    lp = _match_length(data, log_preds)
    is_event = data.events == 1
    if not np.any(is_event):
        raise UndefinedMetricError("no event observations")
    resid = np.log(data.times[is_event]) - lp[is_event]
    return float(np.mean(resid ** 2))


def quantile_loss(data: Dataset, log_preds, tau: float, cap_u: float) -> float:
    """IPCW-weighted mean check loss on times capped at cap_u.

    Weights come from the evaluation set's own censoring Kaplan-Meier;
    the unsmoothed check function is used.
    """
    if not cap_u > 0:
        raise InvalidInputError(f"cap_u must be positive, got {cap_u}")
    lp = _match_length(data, log_preds)
    weights = ipcw_weights(data, km_censoring_estimate(data))
    if not np.any(weights > 0):
        warnings.warn("quantile_loss: all observations censored, loss is 0",
                      stacklevel=2)
        return 0.0
    capped = np.minimum(data.times, cap_u)
    return float(np.mean(weights * check(np.log(capped) - lp, tau)))


def default_cap_u(data: Dataset) -> float:
    """95th percentile of observed times, the default follow-up cap."""
    return float(np.percentile(data.times, 95))


def compute_report(data: Dataset, log_preds, tau: float,
                   cap_u: float | None = None) -> MetricsReport:
    if cap_u is None:
        cap_u = default_cap_u(data)
    ci, n_comparable = c_index(data, np.exp(np.asarray(log_preds, dtype=float)))
    return MetricsReport(
        c_index=ci,
        mmse=mmse(data, log_preds),
        quantile_loss=quantile_loss(data, log_preds, tau, cap_u),
        n_comparable_pairs=n_comparable,
        n_events=data.n_events,
        tau=tau,
        cap_u=cap_u,
    )
