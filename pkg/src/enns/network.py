"""Dense feedforward network engine: containers, forward/backward passes,
Adagrad training with early stopping, Xavier initialization and connection
dropout.

Everything is plain numpy with float64 arrays. Functions never mutate their
arguments; training works on private copies, so parameter containers behave
as immutable values and independent calls are safe to run concurrently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .seeding import spawn_rng

EPS_CLIP = 1e-12  # probability clipping before logs
EPS_ADAGRAD = 1e-8

_ACTIVATIONS = ("relu", "sigmoid")
_TASKS = ("regression", "classification")


class NumericalError(RuntimeError):
    """A training or evaluation step produced a non-finite loss."""


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _activation(name: str, z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(z, 0.0)
    return _sigmoid(z)


def _activation_grad(name: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    # relu gradient at exactly 0 is taken as 1 so that cold-start layers
    # (all-zero pre-activations) still pass gradient signal downward.
    if name == "relu":
        return (z >= 0.0).astype(np.float64)
    return a * (1.0 - a)


@dataclass(frozen=True)
class NetworkArchitecture:
    """Shape and task of a feedforward net with scalar output."""

    input_dim: int
    hidden_sizes: tuple[int, ...]
    hidden_activation: str = "relu"
    task: str = "regression"

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if not self.hidden_sizes or any(h < 1 for h in self.hidden_sizes):
            raise ValueError("hidden_sizes must be non-empty with positive entries")
        if self.hidden_activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.hidden_activation!r}")
        if self.task not in _TASKS:
            raise ValueError(f"unknown task {self.task!r}")

    @property
    def num_hidden_layers(self) -> int:
        return len(self.hidden_sizes)

    @property
    def weight_shapes(self) -> list[tuple[int, int]]:
        dims = [self.input_dim, *self.hidden_sizes, 1]
        return [(dims[i], dims[i + 1]) for i in range(len(dims) - 1)]


@dataclass
class NetworkParameters:
    """Weight matrices W_0..W_m, hidden intercepts t_1..t_m and output intercept."""

    weights: list[np.ndarray]
    hidden_intercepts: list[np.ndarray]
    output_intercept: float

    def copy(self) -> "NetworkParameters":
        return NetworkParameters(
            [w.copy() for w in self.weights],
            [t.copy() for t in self.hidden_intercepts],
            float(self.output_intercept),
        )

    def validate_for(self, arch: NetworkArchitecture) -> None:
        shapes = [w.shape for w in self.weights]
        if shapes != arch.weight_shapes:
            raise ValueError(f"weight shapes {shapes} do not match architecture {arch.weight_shapes}")
        if len(self.hidden_intercepts) != arch.num_hidden_layers:
            raise ValueError("wrong number of hidden intercept vectors")
        for t, h in zip(self.hidden_intercepts, arch.hidden_sizes):
            if t.shape != (h,):
                raise ValueError(f"intercept shape {t.shape} does not match layer size {h}")
        for arr in (*self.weights, *self.hidden_intercepts):
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite parameter entries")
        if not np.isfinite(self.output_intercept):
            raise ValueError("non-finite output intercept")


@dataclass
class GradientSet:
    """Gradients (or any parameter-shaped value set, e.g. Adagrad accumulators)."""

    weights: list[np.ndarray]
    hidden_intercepts: list[np.ndarray]
    output_intercept: float

    @classmethod
    def zeros_like(cls, params: NetworkParameters) -> "GradientSet":
        return cls(
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(t) for t in params.hidden_intercepts],
            0.0,
        )


@dataclass(frozen=True)
class Dataset:
    """Design matrix, response vector and task kind."""

    x: np.ndarray
    y: np.ndarray
    task: str = "regression"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError("x must be a 2-D matrix")
        if y.shape != (x.shape[0],):
            raise ValueError("y length must equal number of rows of x")
        if x.shape[0] < 1:
            raise ValueError("need at least one observation")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("non-finite entries in data")
        if self.task not in _TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.task == "classification" and not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("classification responses must be 0/1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def subset_rows(self, idx: np.ndarray) -> "Dataset":
        return Dataset(self.x[idx], self.y[idx], self.task)

    def subset_columns(self, cols: Sequence[int]) -> "Dataset":
        return Dataset(self.x[:, list(cols)], self.y, self.task)


@dataclass(frozen=True)
class TrainOptions:
    """Knobs for the Adagrad training loop."""

    learning_rate: float = 0.1
    max_epochs: int = 200
    batch_size: int | None = None
    patience: int = 10
    validation_fraction: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be non-negative")
        if self.batch_size is not None and self.batch_size < 1:
            raise ValueError("batch_size must be positive when given")
        if self.patience < 0:
            raise ValueError("patience must be non-negative")
        if self.patience > self.max_epochs and self.max_epochs > 0:
            raise ValueError("patience must not exceed max_epochs")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in [0, 1)")


def xavier_init(arch: NetworkArchitecture, seed: int) -> NetworkParameters:
    """Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)); zero intercepts."""
    rng = np.random.default_rng(seed)
    weights = []
    for fan_in, fan_out in arch.weight_shapes:
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
    intercepts = [np.zeros(h) for h in arch.hidden_sizes]
    return NetworkParameters(weights, intercepts, 0.0)


def xavier_row(arch: NetworkArchitecture, seed: int) -> np.ndarray:
    """One freshly drawn input-layer row, at the input layer's Xavier scale."""
    fan_in, fan_out = arch.weight_shapes[0]
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return np.random.default_rng(seed).uniform(-bound, bound, size=fan_out)


def _forward_internal(params: NetworkParameters, arch: NetworkArchitecture, x: np.ndarray):
    """Returns (activations list a_0..a_m, pre-activations z_1..z_m, raw output)."""
    acts = [x]
    zs = []
    a = x
    for i in range(arch.num_hidden_layers):
        z = a @ params.weights[i] + params.hidden_intercepts[i]
        a = _activation(arch.hidden_activation, z)
        zs.append(z)
        acts.append(a)
    out = (a @ params.weights[-1]).ravel() + params.output_intercept
    return acts, zs, out


def forward_batch(params: NetworkParameters, arch: NetworkArchitecture, x: np.ndarray) -> np.ndarray:
    """Network outputs for every row of ``x``; classification outputs are
    sigmoid probabilities clipped into the open unit interval."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != arch.input_dim:
        raise ValueError(f"input has {x.shape} but architecture expects {arch.input_dim} columns")
    _, _, out = _forward_internal(params, arch, x)
    if arch.task == "classification":
        return np.clip(_sigmoid(out), EPS_CLIP, 1.0 - EPS_CLIP)
    return out


def forward(params: NetworkParameters, arch: NetworkArchitecture, x: np.ndarray) -> float:
    """Scalar network output for a single input vector."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != arch.input_dim:
        raise ValueError(f"input length {x.shape[0]} != input_dim {arch.input_dim}")
    return float(forward_batch(params, arch, x[None, :])[0])


def empirical_loss(params: NetworkParameters, arch: NetworkArchitecture, data: Dataset) -> float:
    """Mean squared error (regression) or negative mean log-likelihood
    (classification, probabilities clipped before logs)."""
    eta = forward_batch(params, arch, data.x)
    if data.task == "regression":
        loss = float(np.mean((data.y - eta) ** 2))
    else:
        loss = -float(np.mean(data.y * np.log(eta) + (1.0 - data.y) * np.log(1.0 - eta)))
    if not np.isfinite(loss):
        raise NumericalError("non-finite empirical loss")
    return loss


def backward(params: NetworkParameters, arch: NetworkArchitecture, data: Dataset) -> GradientSet:
    """Exact gradients of the empirical loss for every weight and intercept.

    Gradients of zero-frozen input rows are computed like any other: they are
    the selection criterion for candidate features.
    """
    x, y = data.x, data.y
    if x.shape[1] != arch.input_dim:
        raise ValueError("data does not match architecture input_dim")
    n = x.shape[0]
    acts, zs, out = _forward_internal(params, arch, x)
    if data.task == "regression":
        delta = (2.0 / n) * (out - y)
    else:
        delta = (_sigmoid(out) - y) / n
    delta = delta[:, None]  # (n, 1)

    m = arch.num_hidden_layers
    g_weights: list[np.ndarray] = [None] * (m + 1)  # type: ignore[list-item]
    g_intercepts: list[np.ndarray] = [None] * m  # type: ignore[list-item]
    g_weights[m] = acts[m].T @ delta
    g_out = float(delta.sum())
    for layer in range(m, 0, -1):
        dact = _activation_grad(arch.hidden_activation, zs[layer - 1], acts[layer])
        delta = (delta @ params.weights[layer].T) * dact
        g_weights[layer - 1] = acts[layer - 1].T @ delta
        g_intercepts[layer - 1] = delta.sum(axis=0)
    return GradientSet(g_weights, g_intercepts, g_out)


def adagrad_step(
    params: NetworkParameters,
    grads: GradientSet,
    accumulator: GradientSet,
    lr: float,
) -> tuple[NetworkParameters, GradientSet]:
    """One Adagrad update: acc' = acc + g*g, theta' = theta - lr*g/(sqrt(acc') + eps)."""
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    new_w, new_aw = [], []
    for w, g, a in zip(params.weights, grads.weights, accumulator.weights):
        a2 = a + g * g
        new_aw.append(a2)
        new_w.append(w - lr * g / (np.sqrt(a2) + EPS_ADAGRAD))
    new_t, new_at = [], []
    for t, g, a in zip(params.hidden_intercepts, grads.hidden_intercepts, accumulator.hidden_intercepts):
        a2 = a + g * g
        new_at.append(a2)
        new_t.append(t - lr * g / (np.sqrt(a2) + EPS_ADAGRAD))
    ab = accumulator.output_intercept + grads.output_intercept**2
    b = params.output_intercept - lr * grads.output_intercept / (np.sqrt(ab) + EPS_ADAGRAD)
    return NetworkParameters(new_w, new_t, b), GradientSet(new_aw, new_at, ab)


def dropout_mask(params: NetworkParameters, rate: float, seed: int) -> NetworkParameters:
    """Copy of ``params`` with each hidden/output weight entry (never the
    input layer W_0) independently zeroed with probability ``rate``."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("dropout rate must be in [0, 1)")
    rng = np.random.default_rng(seed)
    weights = [params.weights[0].copy()]
    for w in params.weights[1:]:
        keep = rng.random(w.shape) >= rate
        weights.append(w * keep)
    return NetworkParameters(
        weights, [t.copy() for t in params.hidden_intercepts], float(params.output_intercept)
    )


def _train_loop(
    params: NetworkParameters,
    arch: NetworkArchitecture,
    data: Dataset,
    opts: TrainOptions,
    trainable_input_rows: Sequence[int],
    epoch_hook: Callable[[NetworkParameters, int], NetworkParameters] | None = None,
) -> NetworkParameters:
    """Shared Adagrad loop behind ``train`` and the l1 soft-threshold fit."""
    params.validate_for(arch)
    trainable_set = set(int(j) for j in trainable_input_rows)
    if trainable_set and (min(trainable_set) < 0 or max(trainable_set) >= arch.input_dim):
        raise ValueError("trainable_input_rows out of range")
    frozen = np.array([j for j in range(arch.input_dim) if j not in trainable_set], dtype=int)
    if frozen.size and np.any(params.weights[0][frozen] != 0.0):
        raise ValueError("input rows outside trainable_input_rows must start at zero")

    rng = spawn_rng(opts.rng_seed, "train-loop")
    n = data.n
    n_val = int(np.floor(opts.validation_fraction * n))
    if n_val > 0:
        perm = rng.permutation(n)
        val_data = data.subset_rows(perm[:n_val])
        fit_data = data.subset_rows(perm[n_val:])
        monitor_data = val_data
    else:
        fit_data = data
        monitor_data = data

    cur = params.copy()
    if epoch_hook is not None:
        # checkpoints must all be post-hook states (e.g. thresholded)
        cur = epoch_hook(cur, -1)
    acc = GradientSet.zeros_like(cur)
    best_loss = empirical_loss(cur, arch, monitor_data)
    best = cur.copy()
    stale = 0

    n_fit = fit_data.n
    full_batch = opts.batch_size is None or opts.batch_size >= n_fit
    for epoch in range(opts.max_epochs):
        if full_batch:
            batches = [np.arange(n_fit)]
        else:
            order = rng.permutation(n_fit)
            batches = [order[i : i + opts.batch_size] for i in range(0, n_fit, opts.batch_size)]
        for idx in batches:
            batch = fit_data if full_batch else fit_data.subset_rows(idx)
            grads = backward(cur, arch, batch)
            if frozen.size:
                grads.weights[0][frozen] = 0.0
            cur, acc = adagrad_step(cur, grads, acc, opts.learning_rate)
            if frozen.size:
                cur.weights[0][frozen] = 0.0
        if epoch_hook is not None:
            cur = epoch_hook(cur, epoch)
        try:
            loss = empirical_loss(cur, arch, monitor_data)
        except NumericalError as exc:
            raise NumericalError(f"non-finite loss at epoch {epoch}") from exc
        if loss < best_loss:
            best_loss = loss
            best = cur.copy()
            stale = 0
        else:
            stale += 1
            if opts.patience > 0 and stale >= opts.patience:
                break
    return best


def train(
    params: NetworkParameters,
    arch: NetworkArchitecture,
    data: Dataset,
    opts: TrainOptions,
    trainable_input_rows: Sequence[int] | None = None,
) -> NetworkParameters:
    """Adagrad training returning the best checkpoint.

    Input rows outside ``trainable_input_rows`` (default: all rows trainable)
    must start at zero and remain exactly zero. With validation_fraction > 0
    the checkpoint with the lowest validation loss is returned, otherwise the
    one with the lowest training loss; ties keep the earlier checkpoint.
    """
    if trainable_input_rows is None:
        trainable_input_rows = range(arch.input_dim)
    if data.p != arch.input_dim:
        raise ValueError("data does not match architecture input_dim")
    if data.task != arch.task:
        raise ValueError("data task does not match architecture task")
    return _train_loop(params, arch, data, opts, trainable_input_rows)


# --- model persistence ------------------------------------------------------

MODEL_FORMAT_VERSION = 1


def model_to_json(params: NetworkParameters, arch: NetworkArchitecture) -> dict:
    """Versioned JSON-ready dict: architecture plus row-major weight values."""
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "input_dim": arch.input_dim,
        "hidden_sizes": list(arch.hidden_sizes),
        "hidden_activation": arch.hidden_activation,
        "task": arch.task,
        "weights": [
            {"shape": list(w.shape), "data": [float(v) for v in w.ravel(order="C")]}
            for w in params.weights
        ],
        "hidden_intercepts": [[float(v) for v in t] for t in params.hidden_intercepts],
        "output_intercept": float(params.output_intercept),
    }


def model_from_json(doc: dict) -> tuple[NetworkParameters, NetworkArchitecture]:
    """Inverse of ``model_to_json``; round trips bit-exactly."""
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')!r}")
    arch = NetworkArchitecture(
        input_dim=int(doc["input_dim"]),
        hidden_sizes=tuple(doc["hidden_sizes"]),
        hidden_activation=doc["hidden_activation"],
        task=doc["task"],
    )
    weights = [
        np.asarray(block["data"], dtype=np.float64).reshape(block["shape"], order="C")
        for block in doc["weights"]
    ]
    intercepts = [np.asarray(t, dtype=np.float64) for t in doc["hidden_intercepts"]]
    params = NetworkParameters(weights, intercepts, float(doc["output_intercept"]))
    params.validate_for(arch)
    return params, arch


def save_model(path, params: NetworkParameters, arch: NetworkArchitecture) -> None:
    with open(path, "w", encoding="utf8") as fh:
        json.dump(model_to_json(params, arch), fh)


def load_model(path) -> tuple[NetworkParameters, NetworkArchitecture]:
    with open(path, encoding="utf8") as fh:
        return model_from_json(json.load(fh))
