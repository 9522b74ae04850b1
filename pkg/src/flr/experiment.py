"""Experiment driver: seeded multi-trial protocol with noise injection on the
training split only, metrics aggregation, ablations, sweeps and trace export."""

import dataclasses
import json
import os
import time

import numpy as np

from . import solver
from .classify import Classifier, accuracy, fit_least_squares, standardize_apply, standardize_fit
from .data import NoisyDataset, load_csv, make_planted, split
from .errors import NumericError, ValidationError
from .noise import NoiseSpec, inject_feature_noise, inject_label_noise
from .solver import Hyperparams

ABLATION_FULL = "full"
ABLATION_NO_FEATURE = "no_feature_recovery"
ABLATION_NO_LABEL = "no_label_recovery"

_ABLATIONS = (ABLATION_FULL, ABLATION_NO_FEATURE, ABLATION_NO_LABEL)

SWEEPABLE = ("lambda1", "lambda2", "lambda3")


@dataclasses.dataclass
class ExperimentConfig:
    """One experiment: a dataset source (CSV path or planted-instance spec),
    the noise to inject, solver hyperparameters, and the trial protocol."""

    dataset: str | None = None
    planted: dict | None = None
    noise: NoiseSpec = dataclasses.field(default_factory=NoiseSpec)
    hyperparams: Hyperparams = dataclasses.field(default_factory=Hyperparams)
    trials: int = 5
    train_fraction: float = 0.8
    standardize: bool = False
    ablation: str = ABLATION_FULL
    output_dir: str = "flr-out"

    def __post_init__(self):
        if (self.dataset is None) == (self.planted is None):
            raise ValidationError("exactly one of 'dataset' and 'planted' must be given")
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError("train_fraction must lie strictly between 0 and 1")
        if self.ablation not in _ABLATIONS:
            raise ValidationError(f"ablation must be one of {_ABLATIONS}")

    @classmethod
    def from_dict(cls, payload):
        payload = dict(payload)
        if "noise" in payload:
            payload["noise"] = NoiseSpec(**payload["noise"])
        if "hyperparams" in payload:
            hp = dict(payload["hyperparams"])
            if hp.get("mu_cap") == "none":
                hp["mu_cap"] = None
            payload["hyperparams"] = Hyperparams(**hp)
        return cls(**payload)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        out = dataclasses.asdict(self)
        if out["hyperparams"]["mu_cap"] is None:
            out["hyperparams"]["mu_cap"] = "none"
        return out


def _load_input_dataset(cfg):
    if cfg.dataset is not None:
        return load_csv(cfg.dataset)
    spec = dict(cfg.planted)
    missing = [k for k in ("n", "d", "c", "rank") if k not in spec]
    if missing:
        raise ValidationError(f"planted spec is missing {missing}")
    inst = make_planted(
        n=spec["n"],
        d=spec["d"],
        c=spec["c"],
        rank=spec["rank"],
        sparsity=spec.get("sparsity", 0.0),
        eta_l=spec.get("eta_l", 0.0),
        seed=spec.get("seed", 0),
    )
    return inst.noisy


def corrupt_training_split(ds, train_fraction, noise, seed):
    """Split, then inject feature and label noise into the training side only.

    Returns (noisy_train, clean_test)."""
    train, test = split(ds, train_fraction, seed)
    trial_noise = dataclasses.replace(noise, seed=seed)
    features = inject_feature_noise(train.features, trial_noise)
    labels = inject_label_noise(train.labels, trial_noise)
    noisy_train = NoisyDataset(features, labels, ds.class_names)
    return noisy_train, test


def classifier_from_result(result, means=None, scales=None):
    return Classifier(Z=result.Z_star, means=means, scales=scales)


def emit_trace(fit_result, path):
    """Write the convergence trace as CSV: iteration, the five residuals,
    the objective value and mu."""
    trace = fit_result.trace
    with open(path, "w") as fh:
        fh.write("iteration,res_xef,res_ybel,res_zj,res_bkj,res_xk,objective,mu\n")
        for i in range(len(trace)):
            res = ",".join(repr(r) for r in trace.residuals[i])
            fh.write(
                f"{trace.iterations[i]},{res},{trace.objective[i]!r},{trace.mu[i]!r}\n"
            )


def _run_single_trial(cfg, ds, trial_index):
    seed = cfg.noise.seed + trial_index
    train, test = corrupt_training_split(ds, cfg.train_fraction, cfg.noise, seed)
    features = train.features
    means = scales = None
    if cfg.standardize:
        means, scales = standardize_fit(features)
        features = standardize_apply(features, means, scales)
    result = solver.fit(
        features,
        train.labels,
        cfg.hyperparams,
        pin_feature_error=cfg.ablation == ABLATION_NO_FEATURE,
        pin_label_error=cfg.ablation == ABLATION_NO_LABEL,
    )
    clf = classifier_from_result(result, means, scales)
    baseline = fit_least_squares(train.features, train.labels, standardize=cfg.standardize)
    y_test = test.class_indices()
    metrics = {
        "trial": trial_index,
        "seed": seed,
        "accuracy": accuracy(clf, test.features, y_test),
        "baseline_accuracy": accuracy(baseline, test.features, y_test),
        "termination": result.termination,
        "iterations": result.state.iter,
        "final_residuals": list(result.trace.residuals[-1]),
        "final_objective": result.trace.objective[-1],
    }
    return metrics, result, clf


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(cfg):
    """Run the trial protocol and write metrics, traces and a summary under
    cfg.output_dir. Wall-clock timings go to a separate file so that every
    other artifact is byte-reproducible."""
    ds = _load_input_dataset(cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    _write_json(os.path.join(cfg.output_dir, "config.json"), cfg.to_dict())

    per_trial = []
    failures = []
    timings = {}
    for t in range(cfg.trials):
        trial_dir = os.path.join(cfg.output_dir, f"trial_{t}")
        os.makedirs(trial_dir, exist_ok=True)
        started = time.perf_counter()
        try:
            metrics, result, _ = _run_single_trial(cfg, ds, t)
        except NumericError as exc:
            failures.append({"trial": t, "error": str(exc)})
            _write_json(os.path.join(trial_dir, "metrics.json"), {"trial": t, "error": str(exc)})
            continue
        finally:
            timings[f"trial_{t}"] = time.perf_counter() - started
        _write_json(os.path.join(trial_dir, "metrics.json"), metrics)
        emit_trace(result, os.path.join(trial_dir, "trace.csv"))
        per_trial.append(metrics)

    if not per_trial:
        raise NumericError(f"all {cfg.trials} trials failed: {failures}")

    accs = np.asarray([m["accuracy"] for m in per_trial])
    base = np.asarray([m["baseline_accuracy"] for m in per_trial])
    summary = {
        "trials": cfg.trials,
        "completed": len(per_trial),
        "accuracy_mean": float(accs.mean()),
        "accuracy_std": float(accs.std()),
        "baseline_accuracy_mean": float(base.mean()),
        "baseline_accuracy_std": float(base.std()),
        "failures": failures,
        "per_trial": per_trial,
    }
    _write_json(os.path.join(cfg.output_dir, "summary.json"), summary)
    _write_json(os.path.join(cfg.output_dir, "timings.json"), timings)
    return summary


def sweep(cfg, param, values):
    """Rerun the experiment once per value of one trade-off weight, holding
    everything else fixed; returns the per-value summaries in value order."""
    if param not in SWEEPABLE:
        raise ValidationError(f"sweep parameter must be one of {SWEEPABLE}")
    if not values:
        raise ValidationError("sweep needs at least one value")
    os.makedirs(cfg.output_dir, exist_ok=True)
    rows = []
    for value in values:
        sub = dataclasses.replace(
            cfg,
            hyperparams=dataclasses.replace(cfg.hyperparams, **{param: value}),
            output_dir=os.path.join(cfg.output_dir, f"{param}_{value:g}"),
        )
        summary = run_experiment(sub)
        rows.append({"value": value, "summary": summary})
    table_path = os.path.join(cfg.output_dir, "sweep.csv")
    with open(table_path, "w") as fh:
        fh.write(f"{param},accuracy_mean,accuracy_std\n")
        for row in rows:
            s = row["summary"]
            fh.write(f"{row['value']!r},{s['accuracy_mean']!r},{s['accuracy_std']!r}\n")
    return rows
