"""Feed-forward network built from scratch on numpy.

Hidden layers use the Mish activation (x * tanh(softplus(x))) with inverted
dropout during training; the final layer is linear. Training is minibatch
Adam over a seeded shuffle, with a numerically stable sigmoid cross-entropy
head for binary targets and mean squared error for regression. Everything
is deterministic given (seed, data, config).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

FORMAT_VERSION = 1


class NeuralNetError(Exception):
    pass


class ShapeError(NeuralNetError):
    pass


class TaskMismatchError(NeuralNetError):
    pass


class TrainingDivergedError(NeuralNetError):
    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        super().__init__(f"non-finite loss {loss} at epoch {epoch}")


# ---------------------------------------------------------------------------
# activations


def softplus(x):
    """ln(1 + e^x), stable for large |x|."""
    return np.logaddexp(0.0, x)


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=np.float64)))


def mish(x):
    """x * tanh(softplus(x)); elementwise, stable across the real line."""
    x = np.asarray(x, dtype=np.float64)
    return x * np.tanh(softplus(x))


def mish_grad(x):
    x = np.asarray(x, dtype=np.float64)
    t = np.tanh(softplus(x))
    return t + x * (1.0 - t * t) * sigmoid(x)


def swish(x):
    x = np.asarray(x, dtype=np.float64)
    return x * sigmoid(x)


def swish_grad(x):
    x = np.asarray(x, dtype=np.float64)
    s = sigmoid(x)
    return s + x * s * (1.0 - s)


def relu(x):
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def relu_grad(x):
    return (np.asarray(x, dtype=np.float64) > 0.0).astype(np.float64)


_ACTIVATIONS = {
    "mish": (mish, mish_grad),
    "swish": (swish, swish_grad),
    "relu": (relu, relu_grad),
}


# ---------------------------------------------------------------------------
# config / model


@dataclass(frozen=True)
class AdamParams:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclass(frozen=True)
class MLPConfig:
    input_dim: int
    hidden_dims: tuple[int, ...] = (256, 64, 16)
    dropout_rate: float = 0.20
    task: str = "binary"  # "binary" | "regression"
    adam: AdamParams = field(default_factory=AdamParams)
    epochs: int = 30
    batch_size: int = 256
    seed: int = 0
    activation: str = "mish"

    def __post_init__(self):
        if not self.hidden_dims:
            raise ValueError("hidden_dims must be nonempty")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.task not in ("binary", "regression"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "hidden_dims", tuple(int(d) for d in self.hidden_dims))
        if isinstance(self.adam, dict):
            object.__setattr__(self, "adam", AdamParams(**self.adam))

    def layer_dims(self) -> list[tuple[int, int]]:
        dims = [self.input_dim, *self.hidden_dims, 1]
        return list(zip(dims[:-1], dims[1:]))


@dataclass
class MLPModel:
    config: MLPConfig
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    trained_epochs: int = 0
    loss_trace: list[float] = field(default_factory=list)

    def __post_init__(self):
        dims = self.config.layer_dims()
        if len(self.weights) != len(dims) or len(self.biases) != len(dims):
            raise ShapeError("layer count mismatch with config")
        for (d_in, d_out), w, b in zip(dims, self.weights, self.biases):
            if w.shape != (d_in, d_out) or b.shape != (d_out,):
                raise ShapeError(f"layer shape {w.shape}/{b.shape} != ({d_in},{d_out})")
        for arr in (*self.weights, *self.biases):
            if not np.all(np.isfinite(arr)):
                raise NeuralNetError("non-finite parameter")


def init_model(config: MLPConfig) -> MLPModel:
    """Seeded scaled-uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
    rng = np.random.default_rng(config.seed)
    weights, biases = [], []
    for d_in, d_out in config.layer_dims():
        bound = 1.0 / np.sqrt(d_in)
        weights.append(rng.uniform(-bound, bound, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return MLPModel(config=config, weights=weights, biases=biases)


# ---------------------------------------------------------------------------
# forward / backward


def forward(model: MLPModel, X: np.ndarray, train: bool = False, rng: np.random.Generator | None = None):
    """Batch forward pass; returns (outputs (n,), cache for backprop).

    Train mode applies inverted dropout to hidden activations: units are
    zeroed with probability dropout_rate and survivors scaled by
    1/(1 - rate), so inference needs no correction.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.config.input_dim:
        raise ShapeError(f"features have dim {X.shape[1]}, model expects {model.config.input_dim}")
    act, _ = _ACTIVATIONS[model.config.activation]
    rate = model.config.dropout_rate if train else 0.0
    if rate > 0.0 and rng is None:
        raise NeuralNetError("train-mode forward with dropout needs an rng")
    a = X
    pre, post, masks = [], [X], []
    n_hidden = len(model.config.hidden_dims)
    for i in range(n_hidden):
        z = a @ model.weights[i] + model.biases[i]
        a = act(z)
        if rate > 0.0:
            mask = (rng.random(a.shape) >= rate) / (1.0 - rate)
            a = a * mask
        else:
            mask = None
        pre.append(z)
        post.append(a)
        masks.append(mask)
    out = (a @ model.weights[-1] + model.biases[-1])[:, 0]
    cache = {"pre": pre, "post": post, "masks": masks}
    return out, cache


def _loss_and_output_grad(config: MLPConfig, out: np.ndarray, y: np.ndarray):
    n = out.shape[0]
    if config.task == "binary":
        # stable cross-entropy from the logit: max(z,0) - z*y + log(1+e^-|z|)
        loss = float(np.mean(np.maximum(out, 0.0) - out * y + np.log1p(np.exp(-np.abs(out)))))
        grad = (sigmoid(out) - y) / n
    else:
        resid = out - y
        loss = float(np.mean(resid * resid))
        grad = 2.0 * resid / n
    return loss, grad


def backward(model: MLPModel, cache: dict, out_grad: np.ndarray):
    """Gradients of the batch loss wrt every weight and bias."""
    _, act_grad = _ACTIVATIONS[model.config.activation]
    n_hidden = len(model.config.hidden_dims)
    w_grads = [None] * (n_hidden + 1)
    b_grads = [None] * (n_hidden + 1)
    delta = out_grad[:, None]  # (n, 1)
    w_grads[-1] = cache["post"][-1].T @ delta
    b_grads[-1] = delta.sum(axis=0)
    upstream = delta @ model.weights[-1].T
    for i in range(n_hidden - 1, -1, -1):
        mask = cache["masks"][i]
        if mask is not None:
            upstream = upstream * mask
        delta = upstream * act_grad(cache["pre"][i])
        w_grads[i] = cache["post"][i].T @ delta
        b_grads[i] = delta.sum(axis=0)
        upstream = delta @ model.weights[i].T
    return w_grads, b_grads


def train(model: MLPModel, X: np.ndarray, y: np.ndarray) -> MLPModel:
    """Minibatch Adam on a seeded shuffle; returns a new trained model."""
    config = model.config
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"X {X.shape} does not align with y {y.shape}")
    if config.task == "binary" and not np.all((y == 0.0) | (y == 1.0)):
        raise ValueError("binary task labels must be 0/1")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite targets")

    rng = np.random.default_rng(config.seed)
    weights = [w.copy() for w in model.weights]
    biases = [b.copy() for b in model.biases]
    work = MLPModel(config=config, weights=weights, biases=biases)
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]
    adam = config.adam
    t = 0
    n = X.shape[0]
    trace = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            out, cache = forward(work, X[idx], train=True, rng=rng)
            loss, out_grad = _loss_and_output_grad(config, out, y[idx])
            epoch_loss += loss * len(idx)
            w_grads, b_grads = backward(work, cache, out_grad)
            t += 1
            corr1 = 1.0 - adam.beta1 ** t
            corr2 = 1.0 - adam.beta2 ** t
            for i in range(len(weights)):
                for theta, g, m, v in ((weights[i], w_grads[i], m_w[i], v_w[i]),
                                       (biases[i], b_grads[i], m_b[i], v_b[i])):
                    m *= adam.beta1
                    m += (1.0 - adam.beta1) * g
                    v *= adam.beta2
                    v += (1.0 - adam.beta2) * g * g
                    theta -= adam.learning_rate * (m / corr1) / (np.sqrt(v / corr2) + adam.epsilon)
        mean_loss = epoch_loss / n
        if not np.isfinite(mean_loss):
            raise TrainingDivergedError(epoch, mean_loss)
        trace.append(mean_loss)
    return MLPModel(config=config, weights=weights, biases=biases,
                    trained_epochs=config.epochs, loss_trace=trace)


# ---------------------------------------------------------------------------
# prediction


def predict_logit(model: MLPModel, X: np.ndarray) -> np.ndarray:
    out, _ = forward(model, X, train=False)
    return out


def predict_proba(model: MLPModel, features: np.ndarray):
    """Acceptance probability sigmoid(logit); binary models only."""
    if model.config.task != "binary":
        raise TaskMismatchError("predict_proba on a regression model")
    single = np.asarray(features).ndim == 1
    p = sigmoid(predict_logit(model, features))
    return float(p[0]) if single else p


def predict_value(model: MLPModel, features: np.ndarray):
    """Raw linear output; regression models only."""
    if model.config.task != "regression":
        raise TaskMismatchError("predict_value on a binary model")
    single = np.asarray(features).ndim == 1
    out = predict_logit(model, features)
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# gradient verification


def gradient_check(model: MLPModel, features: np.ndarray, label: float, step: float = 1e-5) -> float:
    """Max relative error of analytic vs central-finite-difference gradients.

    Relative error uses an absolute floor so near-zero gradient pairs do not
    blow up the ratio. Dropout must be disabled (inference-mode forward).
    """
    X = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.atleast_1d(np.asarray(label, dtype=np.float64))

    out, cache = forward(model, X, train=False)
    _, out_grad = _loss_and_output_grad(model.config, out, y)
    w_grads, b_grads = backward(model, cache, out_grad)

    def loss_at() -> float:
        o, _ = forward(model, X, train=False)
        loss, _ = _loss_and_output_grad(model.config, o, y)
        return loss

    max_rel = 0.0
    for params, grads in ((model.weights, w_grads), (model.biases, b_grads)):
        for arr, g in zip(params, grads):
            flat = arr.reshape(-1)
            gflat = np.asarray(g).reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + step
                up = loss_at()
                flat[j] = orig - step
                down = loss_at()
                flat[j] = orig
                numeric = (up - down) / (2.0 * step)
                analytic = gflat[j]
                rel = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-3)
                max_rel = max(max_rel, rel)
    return max_rel


# ---------------------------------------------------------------------------
# serialization


def save_model(model: MLPModel, path) -> None:
    """Versioned npz: config as JSON plus raw float64 parameter arrays."""
    cfg = asdict(model.config)
    header = {"format_version": FORMAT_VERSION, "config": cfg,
              "trained_epochs": model.trained_epochs, "loss_trace": model.loss_trace}
    arrays = {}
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"w{i}"] = w
        arrays[f"b{i}"] = b
    np.savez(path, header=np.frombuffer(json.dumps(header, sort_keys=True).encode(), dtype=np.uint8), **arrays)


def load_model(path) -> MLPModel:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header.get("format_version") != FORMAT_VERSION:
            raise NeuralNetError(f"unsupported model format {header.get('format_version')}")
        cfg_dict = header["config"]
        cfg_dict["hidden_dims"] = tuple(cfg_dict["hidden_dims"])
        cfg_dict["adam"] = AdamParams(**cfg_dict["adam"])
        config = MLPConfig(**cfg_dict)
        n_layers = len(config.layer_dims())
        weights = [data[f"w{i}"] for i in range(n_layers)]
        biases = [data[f"b{i}"] for i in range(n_layers)]
    return MLPModel(config=config, weights=weights, biases=biases,
                    trained_epochs=header["trained_epochs"], loss_trace=list(header["loss_trace"]))
