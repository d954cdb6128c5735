"""Survival data containers, Kaplan-Meier estimation of the censoring
distribution, and inverse-probability-of-censoring weights (IPCW)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWeightError, InvalidInputError


@dataclass(frozen=True)
class SurvivalRecord:
    """One subject: observed time, event indicator, covariate vector."""

    time: float
    event: int
    covariates: tuple[float, ...]

    def __post_init__(self):
        if not self.time > 0:
            raise InvalidInputError(f"time must be positive, got {self.time}")
        if self.event not in (0, 1):
            raise InvalidInputError(f"event must be 0 or 1, got {self.event}")


@dataclass
class Dataset:
    """A right-censored sample stored column-wise.

    `times` has shape (n,), `events` (n,) with values in {0,1}, and
    `covariates` (n, p). Treated as immutable after construction.
    """

    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.events = np.asarray(self.events, dtype=int)
        cov = np.asarray(self.covariates, dtype=float)
        if cov.ndim == 1:
            cov = cov.reshape(len(cov), 1)
        self.covariates = cov
        n = len(self.times)
        if n == 0:
            raise InvalidInputError("dataset must be nonempty")
        if self.events.shape != (n,) or self.covariates.shape[0] != n:
            raise InvalidInputError("times, events, covariates length mismatch")
        if np.any(self.times <= 0):
            raise InvalidInputError("all times must be positive")
        if not np.all(np.isin(self.events, (0, 1))):
            raise InvalidInputError("events must be 0 or 1")
        if not self.feature_names:
            self.feature_names = tuple(f"x{j}" for j in range(self.p))
        if len(self.feature_names) != self.p:
            raise InvalidInputError("feature_names length must equal covariate dimension")

    @property
    def n(self) -> int:
        return len(self.times)

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    @property
    def n_events(self) -> int:
        return int(self.events.sum())

    @property
    def records(self) -> tuple[SurvivalRecord, ...]:
        return tuple(
            SurvivalRecord(float(t), int(d), tuple(x))
            for t, d, x in zip(self.times, self.events, self.covariates)
        )

    @classmethod
    def from_records(cls, records, feature_names=()) -> "Dataset":
        records = list(records)
        if not records:
            raise InvalidInputError("dataset must be nonempty")
        p = len(records[0].covariates)
        if any(len(r.covariates) != p for r in records):
            raise InvalidInputError("covariate dimension differs across records")
        return cls(
            times=np.array([r.time for r in records]),
            events=np.array([r.event for r in records]),
            covariates=np.array([r.covariates for r in records]).reshape(len(records), p),
            feature_names=tuple(feature_names),
        )

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            times=self.times[idx],
            events=self.events[idx],
            covariates=self.covariates[idx],
            feature_names=self.feature_names,
        )


@dataclass(frozen=True)
class KmCurve:
    """Right-continuous step estimate of a survival function.

    The curve equals 1 before the first jump time and `survival_values[k]`
    on [jump_times[k], jump_times[k+1]).
    """

    jump_times: np.ndarray
    survival_values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.jump_times, dtype=float)
        s = np.asarray(self.survival_values, dtype=float)
        object.__setattr__(self, "jump_times", t)
        object.__setattr__(self, "survival_values", s)
        if t.shape != s.shape:
            raise InvalidInputError("jump_times and survival_values length mismatch")
        if len(t) and (np.any(t <= 0) or np.any(np.diff(t) <= 0)):
            raise InvalidInputError("jump_times must be strictly increasing and positive")
        if len(s) and (np.any(s < 0) or np.any(s > 1) or np.any(np.diff(s) > 0)):
            raise InvalidInputError("survival_values must be nonincreasing within [0,1]")

    def eval(self, t):
        """Right-continuous value at t (scalar or array)."""
        idx = np.searchsorted(self.jump_times, t, side="right") - 1
        return self._lookup(idx)

    def eval_left(self, t):
        """Left limit at t (scalar or array)."""
        idx = np.searchsorted(self.jump_times, t, side="left") - 1
        return self._lookup(idx)

    def _lookup(self, idx):
        if len(self.survival_values) == 0:
            vals = np.ones_like(np.asarray(idx), dtype=float)
        else:
            vals = np.where(idx < 0, 1.0, self.survival_values[np.maximum(idx, 0)])
        if np.ndim(idx) == 0:
            return float(vals)
        return vals


def km_censoring_estimate(data: Dataset) -> KmCurve:
    """Product-limit estimator of the censoring survival function.

    Censored observations (event=0) are the "events" of this estimator. At
    tied observed times, failures leave the risk set before censorings, so
    the risk count for censorings at time t excludes failures at t.
    """
    if data.n == 0:
        raise InvalidInputError("empty dataset")
    times = data.times
    events = data.events
    distinct = np.unique(times)
    jump_times = []
    values = []
    surv = 1.0
    for t in distinct:
        at_t = times == t
        d_cens = int(np.sum(at_t & (events == 0)))
        if d_cens == 0:
            continue
        n_events_at_t = int(np.sum(at_t & (events == 1)))
        at_risk = int(np.sum(times >= t)) - n_events_at_t
        surv *= 1.0 - d_cens / at_risk
        jump_times.append(float(t))
        values.append(surv)
    return KmCurve(np.array(jump_times), np.array(values))


def km_eval_left(curve: KmCurve, t) -> float:
    """Left limit of the step function at t > 0."""
    if np.any(np.asarray(t) <= 0):
        raise InvalidInputError("t must be positive")
    return curve.eval_left(t)


def ipcw_weights(data: Dataset, curve: KmCurve) -> np.ndarray:
    """IPCW vector: event / G_hat(Y-) per record, zero on censored rows."""
    g_left = curve.eval_left(data.times)
    g_left = np.atleast_1d(np.asarray(g_left, dtype=float))
    weights = np.zeros(data.n)
    is_event = data.events == 1
    if np.any(g_left[is_event] <= 0):
        raise DegenerateWeightError("censoring survival is zero at an event time")
    weights[is_event] = 1.0 / g_left[is_event]
    return weights
