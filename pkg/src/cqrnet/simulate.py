"""Simulation-study generator: piecewise-exponential failure times over a
covariate grid, optional multiplicative group effect, and uniform
censoring calibrated to a target proportion."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CalibrationError, InvalidConfigError, InvalidInputError
from .survival import Dataset

NO_GROUP = "no_group_effect"
GROUP = "group_effect"

CENSOR_TARGETS = (0.1, 0.3, 0.5, 0.7)

DEFAULT_BREAKPOINTS = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0)
# unimodal failure-time pattern: slow failures in the middle of the span
DEFAULT_RATES = (2.0, 0.5, 0.2, 0.5, 2.0)
DEFAULT_GROUP_MULTIPLIER = 2.0


@dataclass(frozen=True)
class Scenario:
    kind: str = NO_GROUP
    breakpoints: tuple[float, ...] = DEFAULT_BREAKPOINTS
    rates: tuple[float, ...] = DEFAULT_RATES
    group_multiplier: float = DEFAULT_GROUP_MULTIPLIER
    censor_bound: float = 1e12

    def __post_init__(self):
        if self.kind not in (NO_GROUP, GROUP):
            raise InvalidConfigError(f"unknown scenario kind {self.kind!r}")
        bp = np.asarray(self.breakpoints, dtype=float)
        if len(bp) < 2 or np.any(np.diff(bp) <= 0):
            raise InvalidConfigError("breakpoints must be increasing with >= 2 entries")
        if len(self.rates) != len(bp) - 1:
            raise InvalidConfigError("need one rate per breakpoint segment")
        if any(r <= 0 for r in self.rates):
            raise InvalidConfigError("rates must be positive")
        if not self.group_multiplier > 0:
            raise InvalidConfigError("group_multiplier must be positive")
        if not self.censor_bound > 0:
            raise InvalidConfigError("censor_bound must be positive")

    @property
    def has_group(self) -> bool:
        return self.kind == GROUP

    def with_censor_bound(self, c: float) -> "Scenario":
        return replace(self, censor_bound=c)

    def segment_rates(self, x) -> np.ndarray:
        """Hazard rate of the segment containing each covariate value."""
        bp = np.asarray(self.breakpoints)
        idx = np.clip(np.searchsorted(bp, x, side="right") - 1, 0, len(self.rates) - 1)
        return np.asarray(self.rates)[idx]


@dataclass(frozen=True)
class SimReplicate:
    dataset: Dataset
    truth: np.ndarray  # true failure times, oracle evaluation only


def _draw_failures(scenario: Scenario, n: int, rng: np.random.Generator):
    bp = scenario.breakpoints
    x = rng.uniform(bp[0], bp[-1], n)
    group = rng.integers(0, 2, n) if scenario.has_group else None
    t = rng.exponential(1.0, n) / scenario.segment_rates(x)
    if group is not None:
        t = t * np.where(group == 1, scenario.group_multiplier, 1.0)
    return x, group, t


def simulate(scenario: Scenario, n: int, seed: int) -> SimReplicate:
    """One replicate of n subjects; deterministic given seed."""
    if n < 1:
        raise InvalidInputError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    x, group, t = _draw_failures(scenario, n, rng)
    c = rng.uniform(0.0, scenario.censor_bound, n)
    observed = np.minimum(t, c)
    events = (t <= c).astype(int)
    if group is None:
        covariates = x.reshape(-1, 1)
        names = ("x",)
    else:
        covariates = np.column_stack([x, group.astype(float)])
        names = ("x", "group")
    dataset = Dataset(times=observed, events=events, covariates=covariates,
                      feature_names=names)
    return SimReplicate(dataset=dataset, truth=t)


def calibrate_censor_bound(scenario: Scenario, target: float, seed: int,
                           n_draws: int = 100_000,
                           bounds: tuple[float, float] = (0.05, 1e5),
                           tol: float = 0.005) -> float:
    """Bisection for the uniform censoring bound hitting a target proportion.

    Uses one common Monte Carlo sample across all candidate bounds, so the
    estimated censoring proportion is monotone in c and the result is
    deterministic given seed.
    """
    if not 0.0 < target < 1.0:
        raise InvalidInputError(f"target must be in (0,1), got {target}")
    rng = np.random.default_rng(seed)
    _, _, t = _draw_failures(scenario, n_draws, rng)
    u = rng.uniform(0.0, 1.0, n_draws)

    def censored_proportion(c: float) -> float:
        return float(np.mean(u * c < t))

    lo, hi = bounds
    if not (censored_proportion(hi) <= target <= censored_proportion(lo)):
        raise CalibrationError(
            f"target {target} unreachable within search bounds {bounds}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        prop = censored_proportion(mid)
        if abs(prop - target) <= tol:
            return mid
        if prop > target:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(f"bisection failed to reach target {target} +- {tol}")


def true_quantile(scenario: Scenario, x: float, group: bool, tau: float) -> float:
    """Closed-form conditional quantile of the failure time."""
    bp = scenario.breakpoints
    if not bp[0] <= x <= bp[-1]:
        raise InvalidInputError(f"x={x} outside covariate span [{bp[0]}, {bp[-1]}]")
    if not 0.0 < tau < 1.0:
        raise InvalidInputError(f"tau must be in (0,1), got {tau}")
    rate = float(scenario.segment_rates(np.asarray([x]))[0])
    q = -np.log1p(-tau) / rate
    if group and scenario.has_group:
        q *= scenario.group_multiplier
    return float(q)
