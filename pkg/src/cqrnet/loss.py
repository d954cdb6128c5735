"""Check (pinball) loss, its Huber-smoothed variant, and the weighted
training objective on the log-time scale."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, InvalidInputError

DEFAULT_XI = 0.125


@dataclass(frozen=True)
class LossConfig:
    tau: float
    xi: float = DEFAULT_XI
    use_huber: bool = True

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise InvalidConfigError(f"tau must be in (0,1), got {self.tau}")
        if self.xi < 0:
            raise InvalidConfigError(f"xi must be >= 0, got {self.xi}")
        if self.xi == 0 and self.use_huber:
            raise InvalidConfigError("xi = 0 requires use_huber = False")


def _validate_tau(tau: float):
    if not 0.0 < tau < 1.0:
        raise InvalidConfigError(f"tau must be in (0,1), got {tau}")


def _validate_xi(xi: float):
    if not xi > 0:
        raise InvalidConfigError(f"xi must be positive, got {xi}")


def _maybe_scalar(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


def check(u, tau: float):
    """rho_tau(u) = u * (tau - 1{u <= 0}); nonnegative, convex."""
    _validate_tau(tau)
    ua = np.asarray(u, dtype=float)
    out = ua * (tau - (ua <= 0))
    return _maybe_scalar(u, out)


def check_subgrad(u, tau: float):
    """A subgradient of the check function: tau for u>0, tau-1 for u<0, 0 at 0."""
    _validate_tau(tau)
    ua = np.asarray(u, dtype=float)
    out = np.where(ua > 0, tau, np.where(ua < 0, tau - 1.0, 0.0))
    return _maybe_scalar(u, out)


def _huber_base(ua: np.ndarray, xi: float) -> np.ndarray:
    # quadratic of matching slope inside |u| <= xi, linear beyond
    au = np.abs(ua)
    return np.where(au <= xi, ua * ua / (2.0 * xi), au - xi / 2.0)


def huber_check(u, tau: float, xi: float):
    """Check function with the kink at 0 replaced by a quadratic zone.

    tau * h(u) for u >= 0 and (1 - tau) * h(u) for u < 0, where h is the
    Huber function with half-width xi. Continuously differentiable,
    convex, and within max(tau, 1-tau) * xi / 2 of the plain check loss.
    """
    _validate_tau(tau)
    _validate_xi(xi)
    ua = np.asarray(u, dtype=float)
    out = np.where(ua >= 0, tau, 1.0 - tau) * _huber_base(ua, xi)
    return _maybe_scalar(u, out)


def huber_check_grad(u, tau: float, xi: float):
    """Exact derivative of huber_check with respect to u."""
    _validate_tau(tau)
    _validate_xi(xi)
    ua = np.asarray(u, dtype=float)
    base = np.where(np.abs(ua) <= xi, ua / xi, np.sign(ua))
    out = np.where(ua >= 0, tau, 1.0 - tau) * base
    return _maybe_scalar(u, out)


def _residual_loss(u: np.ndarray, cfg: LossConfig) -> np.ndarray:
    if cfg.use_huber:
        return huber_check(u, cfg.tau, cfg.xi)
    return check(u, cfg.tau)


def _residual_grad(u: np.ndarray, cfg: LossConfig) -> np.ndarray:
    if cfg.use_huber:
        return huber_check_grad(u, cfg.tau, cfg.xi)
    return check_subgrad(u, cfg.tau)


def _check_shapes(log_times, log_preds, weights):
    lt = np.asarray(log_times, dtype=float)
    lp = np.asarray(log_preds, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not (lt.shape == lp.shape == w.shape):
        raise InvalidInputError(
            f"shape mismatch: times {lt.shape}, preds {lp.shape}, weights {w.shape}"
        )
    if not np.all(np.isfinite(lt)):
        raise InvalidInputError("log_times contains non-finite values (time <= 0?)")
    if np.any(w < 0):
        raise InvalidInputError("weights must be nonnegative")
    return lt, lp, w


def weighted_loss(log_times, log_preds, weights, cfg: LossConfig) -> float:
    """Sum of w_i * rho_tau(log Y_i - log Qhat_i) over the batch."""
    lt, lp, w = _check_shapes(log_times, log_preds, weights)
    return float(np.sum(w * _residual_loss(lt - lp, cfg)))


def weighted_loss_grad(log_times, log_preds, weights, cfg: LossConfig) -> np.ndarray:
    """Gradient of weighted_loss with respect to the predictions."""
    lt, lp, w = _check_shapes(log_times, log_preds, weights)
    return -w * _residual_grad(lt - lp, cfg)
