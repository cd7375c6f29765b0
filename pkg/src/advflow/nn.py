"""Feed-forward detector network: forward pass, loss, backprop, SGD training.

Architecture is fixed by the detector design: four tanh hidden layers of
20/60/80/90 units and a two-node sigmoid output head ordered
[normal, attack]. Classification is argmax over the two nodes with ties
going to "normal".
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EmptyDataError, ShapeError
from .linalg import Rng, as_matrix

HIDDEN_WIDTHS = (20, 60, 80, 90)
N_CLASSES = 2  # node 0 = normal, node 1 = attack

# sigmoid outputs are clamped this far from 0/1 before the log in the loss
_PROB_EPS = 1e-12


@dataclass
class MlpModel:
    layer_dims: list[int]
    weights: list[np.ndarray]   # weights[i]: (layer_dims[i], layer_dims[i+1])
    biases: list[np.ndarray]    # biases[i]: (layer_dims[i+1],)
    hidden_activation: str = "tanh"
    output_activation: str = "sigmoid"

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    def copy(self) -> "MlpModel":
        return MlpModel(
            layer_dims=list(self.layer_dims),
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            hidden_activation=self.hidden_activation,
            output_activation=self.output_activation,
        )


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 256
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")


def build_model(layer_dims, rng: Rng) -> MlpModel:
    """Glorot-uniform weights, zero biases, for an arbitrary layer stack."""
    dims = [int(d) for d in layer_dims]
    if any(d < 1 for d in dims) or len(dims) < 2:
        raise ConfigError(f"invalid layer dims {dims}")
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, (fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(layer_dims=dims, weights=weights, biases=biases)


def build_paper_model(input_dim: int, rng: Rng) -> MlpModel:
    """The detector preset: input -> 20 -> 60 -> 80 -> 90 -> 2."""
    if input_dim < 1:
        raise ConfigError(f"input_dim must be >= 1, got {input_dim}")
    return build_model([input_dim, *HIDDEN_WIDTHS, N_CLASSES], rng)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_input(model: MlpModel, x) -> np.ndarray:
    x = as_matrix(x)
    if x.shape[1] != model.input_dim:
        raise ShapeError(
            f"input has {x.shape[1]} features, model expects {model.input_dim}"
        )
    return x


def _forward_cached(model: MlpModel, x: np.ndarray) -> list[np.ndarray]:
    """Activations per layer, input included; last entry is the output."""
    acts = [x]
    a = x
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ w + b
        a = _sigmoid(z) if i == last else np.tanh(z)
        acts.append(a)
    return acts


def forward(model: MlpModel, x) -> np.ndarray:
    """Batch of per-class sigmoid outputs, shape (rows, 2), entries in (0, 1)."""
    x = _check_input(model, x)
    return _forward_cached(model, x)[-1]


def _one_hot(y, n_rows: int) -> np.ndarray:
    y = np.asarray(y).reshape(-1).astype(int)
    if y.shape[0] != n_rows:
        raise ShapeError(f"{y.shape[0]} labels for {n_rows} rows")
    if y.size and (y.min() < 0 or y.max() > 1):
        raise ShapeError("labels must be 0 or 1")
    t = np.zeros((n_rows, N_CLASSES))
    t[np.arange(n_rows), y] = 1.0
    return t


def _bce_from_probs(probs: np.ndarray, targets: np.ndarray) -> float:
    p = np.clip(probs, _PROB_EPS, 1.0 - _PROB_EPS)
    per_sample = -(targets * np.log(p) + (1.0 - targets) * np.log(1.0 - p)).sum(axis=1)
    return float(per_sample.mean())


def loss(model: MlpModel, x, y) -> float:
    """Mean over the batch of per-sample BCE summed across both output nodes."""
    x = _check_input(model, x)
    targets = _one_hot(y, x.shape[0])
    return _bce_from_probs(forward(model, x), targets)


def gradients(model: MlpModel, x, y):
    """Backprop: (weight grads, bias grads, input grad) of `loss`."""
    x = _check_input(model, x)
    n = x.shape[0]
    targets = _one_hot(y, n)
    acts = _forward_cached(model, x)

    n_layers = len(model.weights)
    d_weights = [None] * n_layers
    d_biases = [None] * n_layers

    # sigmoid + BCE collapse: dJ/dz_out = (a - t) / batch
    delta = (acts[-1] - targets) / n
    for layer in range(n_layers - 1, -1, -1):
        d_weights[layer] = acts[layer].T @ delta
        d_biases[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * (1.0 - acts[layer] ** 2)
        else:
            d_input = delta @ model.weights[0].T
    return d_weights, d_biases, d_input


def input_gradient(model: MlpModel, x, y) -> np.ndarray:
    """dJ/dx, same shape as x."""
    return gradients(model, x, y)[2]


def train(model: MlpModel, data, cfg: TrainConfig, rng: Rng):
    """Mini-batch SGD; returns (trained copy, per-epoch full-data loss trace)."""
    x, y = data.features, data.labels
    n = x.shape[0]
    if n == 0:
        raise EmptyDataError("cannot train on an empty dataset")
    model = model.copy()
    trace = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            d_w, d_b, _ = gradients(model, x[idx], y[idx])
            for i in range(len(model.weights)):
                model.weights[i] -= cfg.learning_rate * d_w[i]
                model.biases[i] -= cfg.learning_rate * d_b[i]
        trace.append(loss(model, x, y))
    return model, trace


def predict(model: MlpModel, x) -> np.ndarray:
    """Per-row argmax over [normal, attack]; exact ties go to 0 (normal)."""
    return np.argmax(forward(model, x), axis=1)


def save_model(model: MlpModel, path) -> None:
    """Full-precision JSON dump; load_model round-trips bit-identically."""
    doc = {
        "layer_dims": model.layer_dims,
        "hidden_activation": model.hidden_activation,
        "output_activation": model.output_activation,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_model(path) -> MlpModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return MlpModel(
        layer_dims=[int(d) for d in doc["layer_dims"]],
        weights=[np.array(w, dtype=np.float64) for w in doc["weights"]],
        biases=[np.array(b, dtype=np.float64) for b in doc["biases"]],
        hidden_activation=doc["hidden_activation"],
        output_activation=doc["output_activation"],
    )
