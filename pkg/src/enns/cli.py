"""Command-line front door: data generation, selection, estimation,
repeated experiments and verification of the selection-probability formulas.

External conventions: feature indices are 1-based and match the x1..xp CSV
headers; floats are serialized with 17 significant digits so files round-trip
bit-exactly; exit codes are 0 (ok), 1 (usage/config error), 2 (data error)
and 3 (numerical failure).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .ensemble import EnnsConfig, SelectionReport, enns_select
from .estimation import SparsitySpec, fit_l1
from .metrics import classification_metrics, regression_metrics, selection_metrics
from .network import (
    Dataset,
    NetworkArchitecture,
    NumericalError,
    TrainOptions,
    forward_batch,
    save_model,
    train,
    xavier_init,
)
from .seeding import derive_seed, spawn_rng
from .simulate import ResponseSpec, gen_design_correlated, gen_design_uniform, gen_response
from .stagewise import DnpConfig, dnp_run
from .theory import (
    SignalProfile,
    mc_first_selection,
    mc_select_over,
    prob_first_correct,
    prob_select_over,
)

FLOAT_FMT = "%.17g"


class UsageError(Exception):
    """Bad flags, bad config keys or inconsistent request."""


class DataError(Exception):
    """Unreadable or malformed input files."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); route to exit code 1
        raise UsageError(message)


def _fmt(value: float) -> str:
    return FLOAT_FMT % value


# --- CSV I/O ----------------------------------------------------------------------


def write_matrix_csv(path: Path, header: Sequence[str], matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in np.atleast_2d(matrix):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_matrix_csv(path) -> tuple[list[str], np.ndarray]:
    try:
        with open(path, encoding="utf8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split(",")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise DataError(f"{path} line {lineno}: expected {len(header)} fields, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise DataError(f"{path} line {lineno}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no data rows")
    return header, np.asarray(rows, dtype=np.float64)


def load_dataset(x_path, y_path, task: str) -> Dataset:
    _, x = read_matrix_csv(x_path)
    y_header, y = read_matrix_csv(y_path)
    if y.shape[1] != 1:
        raise DataError(f"{y_path}: expected a single response column, got {y.shape[1]}")
    try:
        return Dataset(x, y[:, 0], task)
    except ValueError as exc:
        raise DataError(str(exc)) from exc


# --- small flag parsers --------------------------------------------------------------


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v != "")
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v != "")
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated number list, got {text!r}") from exc


def _selected_to_internal(indices: Sequence[int], p: int) -> list[int]:
    out = []
    for j in indices:
        if not 1 <= j <= p:
            raise UsageError(f"selected column {j} outside 1..{p}")
        out.append(j - 1)
    return out


# --- experiment config file -----------------------------------------------------------


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


_CONFIG_KEYS: dict[str, tuple] = {
    # (converter, required, default)
    "design": (str, False, "uniform"),
    "rho": (float, False, None),
    "n": (int, True, None),
    "p": (int, True, None),
    "response": (str, True, None),
    "task": (str, False, "regression"),
    "s": (int, True, None),
    "coef_mean": (float, False, None),
    "coef_sd": (float, False, None),
    "noise_sd": (float, False, 1.0),
    "net_hidden": (_int_list, False, (50, 30, 15, 10)),
    "method": (str, False, "enns"),
    "s0": (int, True, None),
    "bags": (int, False, 10),
    "ps": (float, False, 0.3),
    "bootstrap_size": (int, False, None),
    "per_round": (int, False, None),
    "b1": (int, False, 2),
    "dropout_rate": (float, False, 0.5),
    "norm_q": (float, False, 2.0),
    "hidden": (_int_list, False, (10,)),
    "activation": (str, False, "relu"),
    "learning_rate": (float, False, 0.1),
    "max_epochs": (int, False, 50),
    "batch_size": (int, False, None),
    "patience": (int, False, 0),
    "sparsity_mode": (str, False, "none"),
    "sparsity_values": (_float_list, False, None),
    "repetitions": (int, False, 1),
    "train_fraction": (float, False, 0.6),
    "validation_fraction": (float, False, 0.2),
    "test_fraction": (float, False, 0.2),
    "seed": (int, False, 0),
    "output": (str, False, None),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated contents of a run-experiment config file."""

    design: str
    rho: Optional[float]
    n: int
    p: int
    response: str
    task: str
    s: int
    coef_mean: Optional[float]
    coef_sd: Optional[float]
    noise_sd: float
    net_hidden: tuple[int, ...]
    method: str
    s0: int
    bags: int
    ps: float
    bootstrap_size: Optional[int]
    per_round: Optional[int]
    b1: int
    dropout_rate: float
    norm_q: float
    hidden: tuple[int, ...]
    activation: str
    learning_rate: float
    max_epochs: int
    batch_size: Optional[int]
    patience: int
    sparsity_mode: str
    sparsity_values: Optional[tuple[float, ...]]
    repetitions: int
    train_fraction: float
    validation_fraction: float
    test_fraction: float
    seed: int
    output: Optional[str]


def parse_experiment_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format; unknown keys are errors."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        if key in values:
            raise UsageError(f"config line {lineno}: duplicate key {key!r}")
        conv = _CONFIG_KEYS[key][0]
        try:
            values[key] = conv(val)
        except UsageError:
            raise
        except ValueError as exc:
            raise UsageError(f"config line {lineno}: bad value for {key}: {exc}") from exc
    for key, (_, required, default) in _CONFIG_KEYS.items():
        if key not in values:
            if required:
                raise UsageError(f"config is missing required key {key!r}")
            values[key] = default
    cfg = ExperimentConfig(**values)
    _validate_experiment_config(cfg)
    return cfg


def _validate_experiment_config(cfg: ExperimentConfig) -> None:
    if cfg.design not in ("uniform", "correlated"):
        raise UsageError(f"unknown design {cfg.design!r}")
    if cfg.design == "correlated" and cfg.rho is None:
        raise UsageError("correlated design needs rho")
    if cfg.response not in ("linear", "additive", "network"):
        raise UsageError(f"unknown response {cfg.response!r}")
    if cfg.task not in ("regression", "classification"):
        raise UsageError(f"unknown task {cfg.task!r}")
    if cfg.method not in ("enns", "dnp"):
        raise UsageError(f"unknown method {cfg.method!r}")
    if cfg.s0 > cfg.p:
        raise UsageError("s0 cannot exceed p")
    fractions = cfg.train_fraction + cfg.validation_fraction + cfg.test_fraction
    if abs(fractions - 1.0) > 1e-9:
        raise UsageError("train/validation/test fractions must sum to 1")
    if cfg.repetitions < 1:
        raise UsageError("repetitions must be >= 1")
    if cfg.sparsity_mode not in ("none", "percentile", "explicit_lambda"):
        raise UsageError(f"unknown sparsity_mode {cfg.sparsity_mode!r}")
    if cfg.sparsity_mode != "none" and cfg.sparsity_values is None:
        raise UsageError("sparsity_values required unless sparsity_mode is none")


# --- shared pipeline pieces --------------------------------------------------------


def _train_options(args_or_cfg, seed: int, validation_fraction: float) -> TrainOptions:
    return TrainOptions(
        learning_rate=args_or_cfg.learning_rate,
        max_epochs=args_or_cfg.max_epochs,
        batch_size=args_or_cfg.batch_size,
        patience=args_or_cfg.patience,
        validation_fraction=validation_fraction,
        rng_seed=seed,
    )


def _dnp_config(args_or_cfg, seed: int, validation_fraction: float = 0.0) -> DnpConfig:
    return DnpConfig(
        norm_q=args_or_cfg.norm_q,
        num_dropouts=args_or_cfg.b1,
        dropout_rate=args_or_cfg.dropout_rate,
        train_opts=_train_options(args_or_cfg, seed, validation_fraction),
    )


def _selection_json(
    method: str,
    s0: int,
    report_or_list,
    seed: int,
    wall_clock: float,
) -> dict:
    if isinstance(report_or_list, SelectionReport):
        selected = [j + 1 for j in report_or_list.selected]
        rounds = [
            {"round": i + 1, "appearances": {str(j + 1): c for j, c in sorted(counts.items())}}
            for i, counts in enumerate(report_or_list.per_round_appearances)
        ]
        complete = report_or_list.complete
    else:
        selected = [j + 1 for j in report_or_list]
        rounds = []
        complete = True
    return {
        "method": method,
        "s0": s0,
        "seed": seed,
        "selected": selected,
        "complete": complete,
        "rounds": rounds,
        "wall_clock_seconds": wall_clock,
    }


def _write_json(doc: dict, path: Optional[str]) -> None:
    text = json.dumps(doc, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf8") as fh:
            fh.write(text + "\n")


# --- subcommands -----------------------------------------------------------------


def cmd_gen_data(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.design == "correlated":
        if args.rho is None:
            raise UsageError("--rho is required for the correlated design")
        x = gen_design_correlated(args.n, args.p, args.rho, derive_seed(args.seed, "design"))
    else:
        x = gen_design_uniform(args.n, args.p, derive_seed(args.seed, "design"))
    spec = ResponseSpec(
        kind=args.response,
        task=args.task,
        s=args.s,
        coef_mean=args.coef_mean,
        coef_sd=args.coef_sd,
        noise_sd=args.noise_sd,
        net_hidden=args.net_hidden,
    )
    y, truth = gen_response(x, spec, derive_seed(args.seed, "response"))
    write_matrix_csv(out / "X.csv", [f"x{j + 1}" for j in range(args.p)], x)
    write_matrix_csv(out / "y.csv", ["y"], y[:, None])
    truth_doc = {
        "support": [j + 1 for j in truth.support],
        "seed": args.seed,
        "n": args.n,
        "p": args.p,
        "design": args.design,
        "rho": args.rho,
        "response": args.response,
        "task": args.task,
        "s": args.s,
        "noise_sd": args.noise_sd,
    }
    with open(out / "truth.json", "w", encoding="utf8") as fh:
        json.dump(truth_doc, fh, indent=2)
        fh.write("\n")
    return 0


def cmd_select(args) -> int:
    data = load_dataset(args.x, args.y, args.task)
    if args.s0 > data.p:
        raise UsageError(f"s0={args.s0} exceeds the number of columns ({data.p})")
    arch = NetworkArchitecture(data.p, args.hidden, args.activation, args.task)
    dnp_cfg = _dnp_config(args, derive_seed(args.seed, "dnp"), args.val_fraction)
    start = time.perf_counter()
    if args.method == "dnp":
        result = dnp_run(data, arch, args.s0, dnp_cfg, args.seed)
    else:
        cfg = EnnsConfig(
            target_s0=args.s0,
            num_bags=args.bags,
            appearance_proportion=args.ps,
            bootstrap_size=args.bootstrap_size,
            per_round=args.per_round,
            dnp=dnp_cfg,
            seed=args.seed,
        )
        result = enns_select(data, arch, cfg)
    wall = time.perf_counter() - start
    _write_json(_selection_json(args.method, args.s0, result, args.seed, wall), args.out)
    return 0


def _constant_prediction(data_fit: Dataset, n_rows: int) -> np.ndarray:
    return np.full(n_rows, float(np.mean(data_fit.y)))


def cmd_estimate(args) -> int:
    data = load_dataset(args.x, args.y, args.task)
    if args.selection_json is not None:
        try:
            with open(args.selection_json, encoding="utf8") as fh:
                selected_1based = json.load(fh)["selected"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read selection from {args.selection_json}: {exc}") from exc
    elif args.selected is not None:
        selected_1based = list(args.selected)
    else:
        raise UsageError("provide --selected or --selection-json")
    selected = _selected_to_internal(selected_1based, data.p)
    if not selected:
        raise UsageError("no columns selected")

    rng = spawn_rng(args.seed, "estimate-split")
    n_test = int(math.floor(args.test_fraction * data.n))
    perm = rng.permutation(data.n)
    test_idx, fit_idx = perm[:n_test], perm[n_test:]
    data_sel = data.subset_columns(selected)
    data_fit = data_sel.subset_rows(fit_idx)

    arch = NetworkArchitecture(len(selected), args.hidden, args.activation, args.task)
    opts = _train_options(args, derive_seed(args.seed, "fit"), args.val_fraction)
    if args.sparsity_mode == "none":
        params = train(xavier_init(arch, opts.rng_seed), arch, data_fit, opts)
    else:
        if args.sparsity_values is None:
            raise UsageError("--sparsity-values required with this sparsity mode")
        spec = SparsitySpec(args.sparsity_mode, args.sparsity_values)
        params = fit_l1(data_fit, arch, spec, opts)

    save_model(args.model_out, params, arch)
    model_doc_extra = {"selected_columns": [j + 1 for j in selected]}
    with open(args.model_out, encoding="utf8") as fh:
        doc = json.load(fh)
    doc.update(model_doc_extra)
    with open(args.model_out, "w", encoding="utf8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    if n_test > 0:
        x_test = data_sel.x[test_idx]
        y_test = data.y[test_idx]
        preds = forward_batch(params, arch, x_test)
        if args.task == "regression":
            metrics = regression_metrics(y_test, preds)
        else:
            metrics = classification_metrics(y_test, preds, threshold=0.5)
        metrics_doc = {"task": args.task, "n_test": int(n_test), "metrics": metrics.as_dict()}
    else:
        metrics_doc = {"task": args.task, "n_test": 0, "metrics": {}}
    _write_json(metrics_doc, args.metrics_out)
    return 0


_REG_METRIC_COLUMNS = ["rmse", "mae", "mape"]
_CLF_METRIC_COLUMNS = ["accuracy", "auc", "f1"]


def _experiment_repetition(cfg: ExperimentConfig, rep: int) -> dict:
    rep_seed = derive_seed(cfg.seed, "rep", rep)
    if cfg.design == "correlated":
        x = gen_design_correlated(cfg.n, cfg.p, cfg.rho, derive_seed(rep_seed, "design"))
    else:
        x = gen_design_uniform(cfg.n, cfg.p, derive_seed(rep_seed, "design"))
    spec = ResponseSpec(
        kind=cfg.response,
        task=cfg.task,
        s=cfg.s,
        coef_mean=cfg.coef_mean,
        coef_sd=cfg.coef_sd,
        noise_sd=cfg.noise_sd,
        net_hidden=cfg.net_hidden,
    )
    y, truth = gen_response(x, spec, derive_seed(rep_seed, "response"))
    data = Dataset(x, y, cfg.task)

    n_test = int(math.floor(cfg.test_fraction * cfg.n))
    perm = spawn_rng(rep_seed, "split").permutation(cfg.n)
    test_idx, rest_idx = perm[:n_test], perm[n_test:]
    data_rest = data.subset_rows(rest_idx)
    inner_val = cfg.validation_fraction / max(cfg.train_fraction + cfg.validation_fraction, 1e-12)

    arch = NetworkArchitecture(cfg.p, cfg.hidden, cfg.activation, cfg.task)
    dnp_cfg = _dnp_config(cfg, derive_seed(rep_seed, "train"), inner_val)
    if cfg.method == "dnp":
        selected = dnp_run(data_rest, arch, cfg.s0, dnp_cfg, derive_seed(rep_seed, "dnp"))
    else:
        enns_cfg = EnnsConfig(
            target_s0=cfg.s0,
            num_bags=cfg.bags,
            appearance_proportion=cfg.ps,
            bootstrap_size=cfg.bootstrap_size,
            per_round=cfg.per_round,
            dnp=dnp_cfg,
            seed=derive_seed(rep_seed, "enns"),
        )
        selected = list(enns_select(data_rest, arch, enns_cfg).selected)
    sel_metrics = selection_metrics(selected, truth.support)

    if selected:
        fit_arch = NetworkArchitecture(len(selected), cfg.hidden, cfg.activation, cfg.task)
        fit_opts = _train_options(cfg, derive_seed(rep_seed, "fit"), inner_val)
        data_fit = data_rest.subset_columns(selected)
        if cfg.sparsity_mode == "none":
            params = train(xavier_init(fit_arch, fit_opts.rng_seed), fit_arch, data_fit, fit_opts)
        else:
            params = fit_l1(data_fit, fit_arch, SparsitySpec(cfg.sparsity_mode, cfg.sparsity_values), fit_opts)
        preds = forward_batch(params, fit_arch, data.x[test_idx][:, selected])
    else:
        preds = _constant_prediction(data_rest, len(test_idx))
        if cfg.task == "classification":
            preds = np.clip(preds, 0.0, 1.0)
    y_test = data.y[test_idx]
    if cfg.task == "regression":
        pred_metrics = regression_metrics(y_test, preds)
    else:
        pred_metrics = classification_metrics(y_test, preds, threshold=0.5)

    return {
        "repetition": rep + 1,
        "seed": rep_seed,
        "status": "ok",
        "n_selected": len(selected),
        "correct_count": sel_metrics.correct_count,
        "false_positive_rate": sel_metrics.false_positive_rate,
        "metrics": pred_metrics,
    }


def run_experiment(cfg: ExperimentConfig) -> tuple[list[str], list[list[str]]]:
    """All repetition rows plus mean and standard-error aggregate rows."""
    metric_cols = _REG_METRIC_COLUMNS if cfg.task == "regression" else _CLF_METRIC_COLUMNS
    header = [
        "repetition",
        "seed",
        "status",
        "n_selected",
        "correct_count",
        "false_positive_rate",
        *metric_cols,
    ]
    rows: list[list[str]] = []
    numeric: list[list[float]] = []
    for rep in range(cfg.repetitions):
        try:
            result = _experiment_repetition(cfg, rep)
        except NumericalError:
            rows.append([str(rep + 1), str(derive_seed(cfg.seed, "rep", rep)), "failed"] + [""] * (3 + len(metric_cols)))
            continue
        metric_values = [getattr(result["metrics"], col) for col in metric_cols]
        record = [
            float(result["n_selected"]),
            float(result["correct_count"]),
            float(result["false_positive_rate"]),
            *[float("nan") if v is None else float(v) for v in metric_values],
        ]
        numeric.append(record)
        rows.append(
            [str(result["repetition"]), str(result["seed"]), "ok"]
            + [_fmt(v) if not math.isnan(v) else "" for v in record]
        )
    if numeric:
        means, stderr = _column_mean_stderr(np.asarray(numeric))
        rows.append(["mean", "", ""] + [_fmt(v) if not math.isnan(v) else "" for v in means])
        rows.append(["stderr", "", ""] + [_fmt(v) if not math.isnan(v) else "" for v in stderr])
    return header, rows


def _column_mean_stderr(table: np.ndarray) -> tuple[list[float], list[float]]:
    means, errs = [], []
    for col in table.T:
        vals = col[~np.isnan(col)]
        if vals.size == 0:
            means.append(float("nan"))
            errs.append(float("nan"))
        else:
            means.append(float(vals.mean()))
            errs.append(float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0)
    return means, errs


def cmd_run_experiment(args) -> int:
    try:
        text = Path(args.config).read_text(encoding="utf8")
    except OSError as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from exc
    cfg = parse_experiment_config(text)
    out = args.out or cfg.output
    if out is None:
        raise UsageError("no output path: set 'output' in the config or pass --out")
    header, rows = run_experiment(cfg)
    with open(out, "w", encoding="utf8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")
    return 0


def cmd_verify_theory(args) -> int:
    pair_cases = []
    for sigma in args.sigmas:
        for bj in args.pair_betas:
            for bk in args.pair_betas:
                analytic = prob_select_over(bj, bk, sigma)
                mc = mc_select_over(
                    bj, bk, sigma, reps=args.reps,
                    seed=derive_seed(args.seed, "pair", _fmt(bj), _fmt(bk), _fmt(sigma)),
                )
                delta = abs(analytic - mc)
                pair_cases.append(
                    {
                        "beta_j": bj,
                        "beta_k": bk,
                        "sigma": sigma,
                        "analytic": analytic,
                        "monte_carlo": mc,
                        "abs_delta": delta,
                        "pass": delta < args.pair_tol,
                    }
                )
    first_cases = []
    for s, p in args.first_cases:
        betas = np.zeros(p)
        betas[:s] = args.beta_support
        profile = SignalProfile(betas, args.first_sigma, s)
        analytic = prob_first_correct(profile)
        mc = mc_first_selection(
            profile, n=p + 10, reps=args.reps, seed=derive_seed(args.seed, "first", s, p)
        )
        delta = abs(analytic - mc)
        first_cases.append(
            {
                "s": s,
                "p": p,
                "beta": args.beta_support,
                "sigma": args.first_sigma,
                "n": p + 10,
                "analytic": analytic,
                "monte_carlo": mc,
                "abs_delta": delta,
                "pass": delta < args.first_tol,
            }
        )
    doc = {
        "seed": args.seed,
        "reps": args.reps,
        "pair_tolerance": args.pair_tol,
        "first_tolerance": args.first_tol,
        "pair_cases": pair_cases,
        "first_selection_cases": first_cases,
        "all_pass": all(c["pass"] for c in pair_cases + first_cases),
    }
    _write_json(doc, args.out)
    return 0


# --- parser ------------------------------------------------------------------------


def _pairs(text: str) -> tuple[tuple[int, int], ...]:
    cases = []
    for part in text.split(","):
        if not part:
            continue
        try:
            s, p = part.split(":")
            cases.append((int(s), int(p)))
        except ValueError as exc:
            raise UsageError(f"expected s:p pairs like '1:2,3:20', got {text!r}") from exc
    return tuple(cases)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="enns", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="generate a synthetic dataset as CSV files")
    g.add_argument("--out-dir", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--design", choices=["uniform", "correlated"], default="uniform")
    g.add_argument("--rho", type=float, default=None)
    g.add_argument("--response", choices=["linear", "additive", "network"], required=True)
    g.add_argument("--task", choices=["regression", "classification"], default="regression")
    g.add_argument("--s", type=int, required=True)
    g.add_argument("--coef-mean", type=float, default=None)
    g.add_argument("--coef-sd", type=float, default=None)
    g.add_argument("--noise-sd", type=float, default=1.0)
    g.add_argument("--net-hidden", type=_int_list, default=(50, 30, 15, 10))
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen_data)

    def add_training_flags(p_):
        p_.add_argument("--hidden", type=_int_list, default=(10,))
        p_.add_argument("--activation", choices=["relu", "sigmoid"], default="relu")
        p_.add_argument("--learning-rate", dest="learning_rate", type=float, default=0.1)
        p_.add_argument("--epochs", dest="max_epochs", type=int, default=50)
        p_.add_argument("--batch-size", dest="batch_size", type=int, default=None)
        p_.add_argument("--patience", type=int, default=0)

    s = sub.add_parser("select", help="run variable selection on CSV data")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--task", choices=["regression", "classification"], default="regression")
    s.add_argument("--method", choices=["enns", "dnp"], default="enns")
    s.add_argument("--s0", type=int, required=True)
    s.add_argument("--bags", type=int, default=10)
    s.add_argument("--ps", type=float, default=0.3)
    s.add_argument("--bootstrap-size", dest="bootstrap_size", type=int, default=None)
    s.add_argument("--per-round", dest="per_round", type=int, default=None)
    s.add_argument("--b1", type=int, default=2)
    s.add_argument("--dropout-rate", dest="dropout_rate", type=float, default=0.5)
    s.add_argument("--norm-q", dest="norm_q", type=float, default=2.0)
    add_training_flags(s)
    s.add_argument("--val-fraction", dest="val_fraction", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_select)

    e = sub.add_parser("estimate", help="fit a model on selected columns and report test metrics")
    e.add_argument("--x", required=True)
    e.add_argument("--y", required=True)
    e.add_argument("--task", choices=["regression", "classification"], default="regression")
    e.add_argument("--selected", type=_int_list, default=None, help="1-based column indices")
    e.add_argument("--selection-json", default=None, help="output of the select subcommand")
    add_training_flags(e)
    e.add_argument("--sparsity-mode", choices=["none", "percentile", "explicit_lambda"], default="none")
    e.add_argument("--sparsity-values", type=_float_list, default=None)
    e.add_argument("--val-fraction", dest="val_fraction", type=float, default=0.0)
    e.add_argument("--test-fraction", dest="test_fraction", type=float, default=0.25)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--model-out", required=True)
    e.add_argument("--metrics-out", default=None)
    e.set_defaults(func=cmd_estimate)

    r = sub.add_parser("run-experiment", help="run a seeded repeated experiment from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_run_experiment)

    v = sub.add_parser("verify-theory", help="compare the probability formulas with simulation")
    v.add_argument("--pair-betas", dest="pair_betas", type=_float_list, default=(0.0, 1.0, 2.0, 3.0))
    v.add_argument("--sigmas", type=_float_list, default=(0.5, 1.0, 2.0))
    v.add_argument("--first-cases", dest="first_cases", type=_pairs, default=((1, 2), (3, 20), (5, 50)))
    v.add_argument("--beta-support", dest="beta_support", type=float, default=2.0)
    v.add_argument("--first-sigma", dest="first_sigma", type=float, default=1.0)
    v.add_argument("--reps", type=int, default=100_000)
    v.add_argument("--pair-tol", dest="pair_tol", type=float, default=0.01)
    v.add_argument("--first-tol", dest="first_tol", type=float, default=0.02)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify_theory)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
