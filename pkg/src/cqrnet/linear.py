"""Censored linear quantile regression baseline: the IPCW-weighted check
loss over a linear predictor in log time, solved with the same smoothed
gradient-descent stack as the network (a zero-hidden-layer model)."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError
from .loss import LossConfig
from .network import NetworkConfig, init_network
from .survival import Dataset
from .training import TrainConfig, TrainLog, train


@dataclass(frozen=True)
class LinearModel:
    """Coefficients on the log-time scale, intercept first (length p+1)."""

    coefficients: np.ndarray

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coef)
        if coef.ndim != 1 or len(coef) < 1 or not np.all(np.isfinite(coef)):
            raise InvalidInputError("coefficients must be a finite 1-d vector")

    def to_csv(self, path, feature_names=()) -> None:
        names = ["intercept"] + (list(feature_names) or
                                 [f"x{j}" for j in range(len(self.coefficients) - 1)])
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "value"])
            for name, value in zip(names, self.coefficients):
                writer.writerow([name, repr(float(value))])


DEFAULT_LINEAR_EPOCHS = 2000


def fit_linear_cqr(data: Dataset, loss: LossConfig,
                   opt: TrainConfig | None = None) -> tuple[LinearModel, TrainLog]:
    """Full-batch fit of the weighted linear quantile model.

    Identical, parameter for parameter, to training a zero-hidden-layer
    network with the same loss, optimizer, and seed: that is literally the
    computation performed. `opt.batch_size` is overridden to n.
    """
    if opt is None:
        opt = TrainConfig(loss=loss, optimizer="adam", learning_rate=0.05,
                          epochs=DEFAULT_LINEAR_EPOCHS, batch_size=data.n)
    cfg = replace(opt, loss=loss, batch_size=data.n)
    net_cfg = NetworkConfig(input_dim=data.p, hidden_layers=())
    model = init_network(net_cfg, cfg.seed)
    trained, log = train(model, data, cfg)
    coefficients = np.concatenate([trained.biases[0], trained.weights[0].ravel()])
    return LinearModel(coefficients), log


def predict_linear(model: LinearModel, x) -> float:
    """exp(beta' (1, x)) for one covariate vector; returns time units."""
    xv = np.atleast_1d(np.asarray(x, dtype=float))
    if len(xv) != len(model.coefficients) - 1:
        raise InvalidInputError(
            f"expected {len(model.coefficients) - 1} covariates, got {len(xv)}"
        )
    return float(np.exp(model.coefficients[0] + model.coefficients[1:] @ xv))


def predict_linear_batch(model: LinearModel, x_matrix) -> np.ndarray:
    xm = np.asarray(x_matrix, dtype=float)
    if xm.ndim == 1:
        xm = xm.reshape(-1, len(model.coefficients) - 1)
    if xm.shape[1] != len(model.coefficients) - 1:
        raise InvalidInputError("covariate dimension mismatch")
    return np.exp(model.coefficients[0] + xm @ model.coefficients[1:])
