"""Post-selection estimation: l1 soft-threshold training, bagged-dropout
prediction and stage-wise refitting on the selected columns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import (
    Dataset,
    NetworkArchitecture,
    NetworkParameters,
    TrainOptions,
    dropout_mask,
    forward_batch,
    xavier_init,
    _train_loop,
)
from .seeding import derive_seed
from .stagewise import DnpConfig, _stagewise_fit


def soft_threshold(v: np.ndarray, c: float) -> np.ndarray:
    """Elementwise shrink-toward-zero: sign(v) * max(|v| - c, 0)."""
    if c < 0:
        raise ValueError("threshold must be non-negative")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - c, 0.0)


def nearest_rank_percentile(values: np.ndarray, pct: float) -> float:
    """Nearest-rank percentile: smallest value v with at least pct% of the
    entries <= v; 0.0 for pct <= 0 (no-op threshold)."""
    flat = np.asarray(values, dtype=np.float64).ravel()
    if not 0.0 <= pct < 100.0:
        raise ValueError("percentile must be in [0, 100)")
    if flat.size == 0 or pct <= 0.0:
        return 0.0
    k = int(np.ceil(pct / 100.0 * flat.size))
    return float(np.partition(flat, k - 1)[k - 1])


@dataclass(frozen=True)
class SparsitySpec:
    """Per-layer soft-threshold levels for the hidden/output weight matrices
    (the input layer and intercepts are never thresholded).

    ``explicit_lambda`` mode: proximal constant lambda_l * learning_rate.
    ``percentile`` mode: threshold at that layer's |weight| percentile, so a
    percentile of 50 forces at least 50% exact zeros in the layer.
    """

    mode: str
    per_layer_values: tuple[float, ...]

    def __post_init__(self):
        if self.mode not in ("explicit_lambda", "percentile"):
            raise ValueError(f"unknown sparsity mode {self.mode!r}")
        object.__setattr__(self, "per_layer_values", tuple(float(v) for v in self.per_layer_values))
        if any(v < 0 for v in self.per_layer_values):
            raise ValueError("sparsity values must be non-negative")
        if self.mode == "percentile" and any(v >= 100.0 for v in self.per_layer_values):
            raise ValueError("percentile values must be < 100")


@dataclass(frozen=True)
class BaggedDropoutSpec:
    """Controls for prediction by averaging randomly pruned network copies."""

    num_repeats: int
    drop_rate: float
    threshold: float = 0.5

    def __post_init__(self):
        if self.num_repeats < 1:
            raise ValueError("num_repeats must be positive")
        if not 0.0 <= self.drop_rate < 1.0:
            raise ValueError("drop_rate must be in [0, 1)")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must be in (0, 1)")


@dataclass(frozen=True)
class BaggedPrediction:
    """Averaged prediction plus the individual pruned-copy predictions."""

    prediction: np.ndarray
    labels: np.ndarray | None
    per_repeat: np.ndarray


def fit_l1(
    data_selected: Dataset,
    arch: NetworkArchitecture,
    spec: SparsitySpec,
    opts: TrainOptions,
) -> NetworkParameters:
    """Alternate one unpenalized Adagrad epoch with per-layer soft-thresholding.

    ``data_selected`` must already be restricted to the selected columns.
    Starting weights come from Xavier initialization seeded by opts.rng_seed;
    with all-zero explicit lambdas the trajectory is identical to plain
    ``train`` from the same initialization.
    """
    if data_selected.p != arch.input_dim:
        raise ValueError("data does not match architecture input_dim")
    if data_selected.task != arch.task:
        raise ValueError("data task does not match architecture task")
    n_layers = arch.num_hidden_layers
    if len(spec.per_layer_values) != n_layers:
        raise ValueError(
            f"need one sparsity value per hidden/output weight matrix ({n_layers}), "
            f"got {len(spec.per_layer_values)}"
        )

    def threshold_epoch(params: NetworkParameters, epoch: int) -> NetworkParameters:
        for layer, value in enumerate(spec.per_layer_values, start=1):
            w = params.weights[layer]
            if spec.mode == "explicit_lambda":
                c = value * opts.learning_rate
            else:
                c = nearest_rank_percentile(np.abs(w), value)
            params.weights[layer] = soft_threshold(w, c)
        return params

    init = xavier_init(arch, opts.rng_seed)
    return _train_loop(init, arch, data_selected, opts, range(arch.input_dim), threshold_epoch)


def predict_bagged_dropout(
    params: NetworkParameters,
    arch: NetworkArchitecture,
    x: np.ndarray,
    spec: BaggedDropoutSpec,
    seed: int,
) -> BaggedPrediction:
    """Average the outputs of ``num_repeats`` randomly pruned copies.

    Regression: the mean prediction. Classification: the mean probability
    p_hat and labels 1{p_hat > threshold}.
    """
    per = np.stack(
        [
            forward_batch(dropout_mask(params, spec.drop_rate, derive_seed(seed, "repeat", k)), arch, x)
            for k in range(spec.num_repeats)
        ]
    )
    mean = per.mean(axis=0)
    if arch.task == "classification":
        labels = (mean > spec.threshold).astype(np.int64)
        return BaggedPrediction(prediction=mean, labels=labels, per_repeat=per)
    return BaggedPrediction(prediction=mean, labels=None, per_repeat=per)


def fit_stagewise(
    data_selected: Dataset, arch: NetworkArchitecture, cfg: DnpConfig
) -> NetworkParameters:
    """Stage-wise refit on already-selected columns: every column is admitted
    in gradient-norm order with warm-started weights, then trained once more."""
    _, params = _stagewise_fit(
        data_selected,
        arch,
        s_target=data_selected.p,
        cfg=cfg,
        seed=cfg.train_opts.rng_seed,
        final_train=True,
    )
    return params
