"""Mini-batch training of the network under the IPCW-weighted check loss,
with a small family of first-order optimizers."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateDataError, InvalidConfigError,
                     InvalidInputError, NumericError)
from .loss import LossConfig, weighted_loss, weighted_loss_grad
from .network import MlpModel, backward, forward
from .survival import Dataset, ipcw_weights, km_censoring_estimate

OPTIMIZERS = ("sgd", "adam", "adadelta", "adamax")

DEFAULT_LEARNING_RATES = {
    "sgd": 1e-2,
    "adam": 1e-3,
    "adamax": 1e-3,
    "adadelta": 1.0,
}


@dataclass(frozen=True)
class TrainConfig:
    loss: LossConfig
    optimizer: str = "adam"
    learning_rate: float | None = None
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    rho: float = 0.95
    adadelta_eps: float = 1e-6

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise InvalidConfigError(f"unknown optimizer {self.optimizer!r}")
        if self.epochs < 1:
            raise InvalidConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise InvalidConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate is not None and self.learning_rate < 0:
            raise InvalidConfigError("learning_rate must be >= 0")

    @property
    def resolved_learning_rate(self) -> float:
        if self.learning_rate is None:
            return DEFAULT_LEARNING_RATES[self.optimizer]
        return self.learning_rate


@dataclass
class OptimizerState:
    kind: str
    step_count: int = 0
    slots: dict = field(default_factory=dict)


def init_optimizer_state(kind: str, params: list[np.ndarray]) -> OptimizerState:
    if kind not in OPTIMIZERS:
        raise InvalidConfigError(f"unknown optimizer {kind!r}")
    zeros = lambda: [np.zeros_like(p) for p in params]
    slots = {}
    if kind in ("adam", "adamax"):
        slots = {"m": zeros(), "v": zeros()}
    elif kind == "adadelta":
        slots = {"sq_grad": zeros(), "sq_update": zeros()}
    return OptimizerState(kind=kind, slots=slots)


def optimizer_step(kind: str, state: OptimizerState, params, grads, lr: float, *,
                   beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                   rho: float = 0.95, delta_eps: float = 1e-6):
    """One update over a list of parameter arrays; returns (params, state).

    Inputs are not mutated; fresh arrays come back.
    """
    if len(params) != len(grads):
        raise InvalidInputError("params/grads length mismatch")
    for i, g in enumerate(grads):
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in parameter block {i}")
    t = state.step_count + 1
    new_params = []
    slots = {k: [a.copy() for a in v] for k, v in state.slots.items()}
    for i, (p, g) in enumerate(zip(params, grads)):
        if kind == "sgd":
            new_params.append(p - lr * g)
        elif kind == "adam":
            m = slots["m"][i] = beta1 * slots["m"][i] + (1 - beta1) * g
            v = slots["v"][i] = beta2 * slots["v"][i] + (1 - beta2) * g * g
            m_hat = m / (1 - beta1 ** t)
            v_hat = v / (1 - beta2 ** t)
            new_params.append(p - lr * m_hat / (np.sqrt(v_hat) + eps))
        elif kind == "adamax":
            m = slots["m"][i] = beta1 * slots["m"][i] + (1 - beta1) * g
            u = slots["v"][i] = np.maximum(beta2 * slots["v"][i], np.abs(g))
            new_params.append(p - (lr / (1 - beta1 ** t)) * m / (u + eps))
        elif kind == "adadelta":
            eg = slots["sq_grad"][i] = rho * slots["sq_grad"][i] + (1 - rho) * g * g
            step = -np.sqrt(slots["sq_update"][i] + delta_eps) / np.sqrt(eg + delta_eps) * g
            slots["sq_update"][i] = rho * slots["sq_update"][i] + (1 - rho) * step * step
            new_params.append(p + lr * step)
        else:
            raise InvalidConfigError(f"unknown optimizer {kind!r}")
    return new_params, OptimizerState(kind=kind, step_count=t, slots=slots)


@dataclass
class TrainLog:
    epoch_losses: list[float]

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "mean_loss"])
            for i, loss in enumerate(self.epoch_losses):
                writer.writerow([i, repr(loss)])


def train(model: MlpModel, data: Dataset, cfg: TrainConfig):
    """Fit a copy of `model` on `data`; returns (trained model, TrainLog).

    IPCW weights are computed once from the full training set. Each epoch
    shuffles with the seeded stream and sweeps batches of cfg.batch_size
    (final short batch kept); batch losses are means over the batch.
    Deterministic given (model, cfg.seed).
    """
    if cfg.batch_size > data.n:
        raise InvalidConfigError(
            f"batch_size {cfg.batch_size} exceeds sample size {data.n}"
        )
    if data.n_events == 0:
        raise DegenerateDataError("no event observations: weighted loss is identically 0")
    weights_all = ipcw_weights(data, km_censoring_estimate(data))
    log_times = np.log(data.times)
    x = data.covariates

    model = model.copy()
    state = init_optimizer_state(cfg.optimizer, model.parameters())
    rng = np.random.default_rng(cfg.seed)
    lr = cfg.resolved_learning_rate
    epoch_losses = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(data.n)
        total = 0.0
        for start in range(0, data.n, cfg.batch_size):
            idx = perm[start:start + cfg.batch_size]
            preds, cache = forward(model, x[idx], "train", rng)
            total += weighted_loss(log_times[idx], preds, weights_all[idx], cfg.loss)
            dpred = weighted_loss_grad(log_times[idx], preds, weights_all[idx],
                                       cfg.loss) / len(idx)
            w_grads, b_grads = backward(model, cache, dpred)
            grads = []
            for wg, bg in zip(w_grads, b_grads):
                grads.extend((wg, bg))
            try:
                new_params, state = optimizer_step(
                    cfg.optimizer, state, model.parameters(), grads, lr,
                    beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.adam_eps,
                    rho=cfg.rho, delta_eps=cfg.adadelta_eps)
            except NumericError as exc:
                raise NumericError(f"epoch {epoch}: {exc}") from exc
            model.set_parameters(new_params)
        mean_loss = total / data.n
        if not np.isfinite(mean_loss):
            raise NumericError(f"non-finite training loss at epoch {epoch}")
        epoch_losses.append(mean_loss)
    return model, TrainLog(epoch_losses)
