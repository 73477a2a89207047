"""Synthetic data generators: uniform and shared-factor correlated designs,
with linear, fixed additive, or random-network responses whose support is
always the first s columns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .network import NetworkArchitecture, NetworkParameters, forward_batch, _sigmoid
from .seeding import spawn_rng

_KINDS = ("linear", "additive", "network")
_TASKS = ("regression", "classification")

DEFAULT_GENERATOR_HIDDEN = (50, 30, 15, 10)


@dataclass(frozen=True)
class ResponseSpec:
    """How to turn a design matrix into responses.

    coef_mean/coef_sd default per task when left None: N(1,1) input weights
    for regression and N(0,1) for classification (linear responses default to
    standard normal coefficients).
    """

    kind: str
    task: str = "regression"
    s: int = 5
    coef_mean: Optional[float] = None
    coef_sd: Optional[float] = None
    noise_sd: float = 1.0
    net_hidden: tuple[int, ...] = DEFAULT_GENERATOR_HIDDEN

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown response kind {self.kind!r}")
        if self.task not in _TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.s < 1:
            raise ValueError("support size s must be positive")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        object.__setattr__(self, "net_hidden", tuple(int(h) for h in self.net_hidden))
        if self.kind == "network" and not self.net_hidden:
            raise ValueError("network responses need at least one hidden layer")

    def resolved_coefs(self) -> tuple[float, float]:
        if self.coef_mean is not None and self.coef_sd is not None:
            return float(self.coef_mean), float(self.coef_sd)
        if self.kind == "network" and self.task == "regression":
            mean, sd = 1.0, 1.0
        else:
            mean, sd = 0.0, 1.0
        return (
            float(self.coef_mean) if self.coef_mean is not None else mean,
            float(self.coef_sd) if self.coef_sd is not None else sd,
        )


@dataclass(frozen=True)
class GroundTruth:
    """What generated the responses: the support and the generator weights."""

    support: tuple[int, ...]
    kind: str
    task: str
    noise_sd: float
    linear_coefs: Optional[np.ndarray] = None
    generator_params: Optional[NetworkParameters] = None
    generator_arch: Optional[NetworkArchitecture] = None


def gen_design_uniform(n: int, p: int, seed: int) -> np.ndarray:
    """n x p matrix of i.i.d. Uniform(-1, 1) entries."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    return np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, p))


def gen_design_correlated(
    n: int, p: int, rho: float, seed: int, truncate: bool = True
) -> np.ndarray:
    """Equicorrelated standard normal design via a shared factor:
    x_ij <- (x_ij + t*u_i)/sqrt(1+t^2) with t = sqrt(rho/(1-rho)) gives
    pairwise correlation rho; entries are then clamped to [-1, 1]
    (pass truncate=False to inspect the pre-truncation matrix)."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be positive")
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must be in [0, 1)")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    u = rng.standard_normal(n)
    t = np.sqrt(rho / (1.0 - rho))
    z = (x + t * u[:, None]) / np.sqrt(1.0 + t * t)
    return np.clip(z, -1.0, 1.0) if truncate else z


def _additive_eta(x: np.ndarray) -> np.ndarray:
    return (
        np.sin(x[:, 0])
        + x[:, 1]
        + np.exp(x[:, 2])
        + x[:, 3] ** 2
        + np.log(x[:, 4] + 2.0)
        - 2.0
    )


def _network_generator(
    p: int, spec: ResponseSpec, rng: np.random.Generator
) -> tuple[NetworkParameters, NetworkArchitecture]:
    arch = NetworkArchitecture(
        input_dim=p, hidden_sizes=spec.net_hidden, hidden_activation="relu", task="regression"
    )
    mean, sd = spec.resolved_coefs()
    weights = []
    w0 = np.zeros(arch.weight_shapes[0])
    w0[: spec.s] = rng.normal(mean, sd, size=(spec.s, arch.weight_shapes[0][1]))
    weights.append(w0)
    for shape in arch.weight_shapes[1:]:
        weights.append(rng.standard_normal(shape))
    intercepts = [np.zeros(h) for h in arch.hidden_sizes]
    return NetworkParameters(weights, intercepts, 0.0), arch


def gen_response(x: np.ndarray, spec: ResponseSpec, seed: int) -> tuple[np.ndarray, GroundTruth]:
    """Responses for a design matrix; the support is always columns 0..s-1.

    Regression adds N(0, noise_sd) noise to the signal; classification draws
    Bernoulli(sigmoid(signal)) labels.
    """
    x = np.asarray(x, dtype=np.float64)
    n, p = x.shape
    if spec.s > p:
        raise ValueError("support size exceeds number of columns")
    if spec.kind == "additive" and spec.s != 5:
        raise ValueError("the additive response has exactly 5 signal columns")

    w_rng = spawn_rng(seed, "weights")
    truth_kwargs: dict = {}
    if spec.kind == "linear":
        mean, sd = spec.resolved_coefs()
        beta = w_rng.normal(mean, sd, size=spec.s)
        eta = x[:, : spec.s] @ beta
        truth_kwargs["linear_coefs"] = beta
    elif spec.kind == "additive":
        eta = _additive_eta(x)
    else:
        gen_params, gen_arch = _network_generator(p, spec, w_rng)
        eta = forward_batch(gen_params, gen_arch, x)
        truth_kwargs["generator_params"] = gen_params
        truth_kwargs["generator_arch"] = gen_arch

    n_rng = spawn_rng(seed, "noise")
    if spec.task == "regression":
        y = eta + n_rng.normal(0.0, spec.noise_sd, size=n)
    else:
        prob = _sigmoid(eta)
        y = (n_rng.random(n) < prob).astype(np.float64)
    truth = GroundTruth(
        support=tuple(range(spec.s)),
        kind=spec.kind,
        task=spec.task,
        noise_sd=spec.noise_sd,
        **truth_kwargs,
    )
    return y, truth
