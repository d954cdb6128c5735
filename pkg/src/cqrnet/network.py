"""Feed-forward network on the log-time scale: initialization, forward pass
with inverted dropout, exact backpropagation, and text serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfigError, InvalidInputError, NumericError

ACTIVATIONS = ("relu", "sigmoid", "hard_sigmoid", "tanh", "selu")
MODES = ("train", "infer", "mc_dropout")

SELU_LAMBDA = 1.05070098
SELU_ALPHA = 1.67326324


def activation_eval(kind: str, u):
    ua = np.asarray(u, dtype=float)
    if kind == "relu":
        out = np.maximum(ua, 0.0)
    elif kind == "sigmoid":
        out = 1.0 / (1.0 + np.exp(-ua))
    elif kind == "hard_sigmoid":
        out = np.clip(0.2 * ua + 0.5, 0.0, 1.0)
    elif kind == "tanh":
        out = np.tanh(ua)
    elif kind == "selu":
        out = SELU_LAMBDA * np.where(ua > 0, ua, SELU_ALPHA * np.expm1(ua))
    else:
        raise InvalidConfigError(f"unknown activation {kind!r}")
    return float(out) if np.ndim(u) == 0 else out


def activation_deriv(kind: str, u):
    """Derivative of activation_eval; subgradient 0 at kinks."""
    ua = np.asarray(u, dtype=float)
    if kind == "relu":
        out = np.where(ua > 0, 1.0, 0.0)
    elif kind == "sigmoid":
        s = 1.0 / (1.0 + np.exp(-ua))
        out = s * (1.0 - s)
    elif kind == "hard_sigmoid":
        out = np.where((ua > -2.5) & (ua < 2.5), 0.2, 0.0)
    elif kind == "tanh":
        out = 1.0 - np.tanh(ua) ** 2
    elif kind == "selu":
        out = SELU_LAMBDA * np.where(ua > 0, 1.0, SELU_ALPHA * np.exp(ua))
    else:
        raise InvalidConfigError(f"unknown activation {kind!r}")
    return float(out) if np.ndim(u) == 0 else out


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    hidden_layers: tuple[int, ...] = ()
    activation: str = "relu"
    dropout_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "hidden_layers", tuple(int(h) for h in self.hidden_layers))
        if self.input_dim < 0:
            raise InvalidConfigError(f"input_dim must be >= 0, got {self.input_dim}")
        if any(h <= 0 for h in self.hidden_layers):
            raise InvalidConfigError("hidden layer sizes must be positive")
        if self.activation not in ACTIVATIONS:
            raise InvalidConfigError(f"unknown activation {self.activation!r}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise InvalidConfigError(f"dropout_rate must be in [0,1), got {self.dropout_rate}")

    @property
    def layer_dims(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_layers, 1)


@dataclass
class MlpModel:
    """Weights and biases for every layer; the last pair is the linear
    single-node output layer."""

    config: NetworkConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        dims = self.config.layer_dims
        expected = list(zip(dims[:-1], dims[1:]))
        if len(self.weights) != len(expected) or len(self.biases) != len(expected):
            raise InvalidConfigError("layer count does not match config")
        for (fan_in, fan_out), w, b in zip(expected, self.weights, self.biases):
            if w.shape != (fan_in, fan_out) or b.shape != (fan_out,):
                raise InvalidConfigError(
                    f"layer shape mismatch: expected {(fan_in, fan_out)}, got {w.shape}"
                )
        if not all(np.all(np.isfinite(a)) for a in self.weights + self.biases):
            raise NumericError("model parameters contain non-finite entries")

    @property
    def n_hidden(self) -> int:
        return len(self.config.hidden_layers)

    def parameters(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def set_parameters(self, params: list[np.ndarray]):
        for i in range(len(self.weights)):
            self.weights[i] = params[2 * i]
            self.biases[i] = params[2 * i + 1]

    def copy(self) -> "MlpModel":
        return MlpModel(
            config=self.config,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            metadata=dict(self.metadata),
        )

    def with_dropout(self, rate: float) -> "MlpModel":
        """Same parameters, different dropout rate (for MC prediction)."""
        return MlpModel(
            config=replace(self.config, dropout_rate=rate),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            metadata=dict(self.metadata),
        )


@dataclass
class ForwardCache:
    """Backprop bookkeeping for one batch."""

    inputs: np.ndarray
    pre_activations: list[np.ndarray]
    post_activations: list[np.ndarray]
    dropout_masks: list[np.ndarray]


def init_network(cfg: NetworkConfig, seed: int) -> MlpModel:
    """Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    dims = cfg.layer_dims
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(config=cfg, weights=weights, biases=biases)


def forward(model: MlpModel, batch: np.ndarray, mode: str = "infer",
            rng: np.random.Generator | None = None):
    """Run the network over a batch of covariate rows.

    Returns (log_preds, cache). Dropout masks are sampled in "train" and
    "mc_dropout" modes with inverted scaling; "infer" applies no dropout
    and ignores rng.
    """
    if mode not in MODES:
        raise InvalidConfigError(f"unknown mode {mode!r}")
    x = np.asarray(batch, dtype=float)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[1] != model.config.input_dim:
        raise InvalidInputError(
            f"batch has {x.shape[1]} columns, model expects {model.config.input_dim}"
        )
    dropout = model.config.dropout_rate
    use_dropout = dropout > 0 and mode in ("train", "mc_dropout")
    if use_dropout and rng is None:
        raise InvalidInputError("dropout requires a random generator")

    a = x
    pre, post, masks = [], [], []
    for i in range(model.n_hidden):
        z = a @ model.weights[i] + model.biases[i]
        h = activation_eval(model.config.activation, z)
        if use_dropout:
            mask = (rng.random(h.shape) >= dropout) / (1.0 - dropout)
        else:
            mask = np.ones_like(h)
        a = h * mask
        pre.append(z)
        post.append(a)
        masks.append(mask)
    log_preds = (a @ model.weights[-1] + model.biases[-1]).ravel()
    if not np.all(np.isfinite(log_preds)):
        raise NumericError("non-finite network output")
    return log_preds, ForwardCache(x, pre, post, masks)


def backward(model: MlpModel, cache: ForwardCache, dloss_dpred: np.ndarray):
    """Exact gradients of the scalar loss wrt every weight and bias.

    `dloss_dpred` is the gradient of the batch loss with respect to the
    network outputs. Returns (weight_grads, bias_grads) shaped like the
    model.
    """
    d = np.asarray(dloss_dpred, dtype=float).ravel()
    if len(cache.pre_activations) != model.n_hidden or d.shape[0] != cache.inputs.shape[0]:
        raise InvalidInputError("cache does not match model/batch")
    n_layers = model.n_hidden + 1
    weight_grads = [None] * n_layers
    bias_grads = [None] * n_layers

    a_last = cache.post_activations[-1] if model.n_hidden else cache.inputs
    dcol = d.reshape(-1, 1)
    weight_grads[-1] = a_last.T @ dcol
    bias_grads[-1] = np.array([d.sum()])
    da = dcol @ model.weights[-1].T

    for i in range(model.n_hidden - 1, -1, -1):
        dh = da * cache.dropout_masks[i]
        dz = dh * activation_deriv(model.config.activation, cache.pre_activations[i])
        a_prev = cache.post_activations[i - 1] if i > 0 else cache.inputs
        weight_grads[i] = a_prev.T @ dz
        bias_grads[i] = dz.sum(axis=0)
        da = dz @ model.weights[i].T
    return weight_grads, bias_grads


def save_model(model: MlpModel, path) -> None:
    """Serialize config and parameters as JSON; floats round-trip exactly."""
    payload = {
        "input_dim": model.config.input_dim,
        "hidden_layers": list(model.config.hidden_layers),
        "activation": model.config.activation,
        "dropout_rate": model.config.dropout_rate,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "metadata": model.metadata,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def load_model(path) -> MlpModel:
    with open(path) as fh:
        payload = json.load(fh)
    try:
        cfg = NetworkConfig(
            input_dim=payload["input_dim"],
            hidden_layers=tuple(payload["hidden_layers"]),
            activation=payload["activation"],
            dropout_rate=payload["dropout_rate"],
        )
        dims = cfg.layer_dims
        weights = [
            np.asarray(w, dtype=float).reshape(fan_in, fan_out)
            for w, fan_in, fan_out in zip(payload["weights"], dims[:-1], dims[1:])
        ]
        biases = [np.asarray(b, dtype=float) for b in payload["biases"]]
        metadata = payload.get("metadata", {})
    except KeyError as exc:
        raise InvalidInputError(f"model file missing field {exc}") from exc
    return MlpModel(config=cfg, weights=weights, biases=biases, metadata=metadata)
