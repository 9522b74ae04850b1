"""Command-line front end: fit, predict, inject, run, sweep, bound."""

import argparse
import json
import sys

import numpy as np

from . import solver
from .classify import (
    BoundInputs,
    load_classifier,
    predict_batch,
    rademacher_bound,
    save_classifier,
    standardize_fit,
    standardize_apply,
)
from .data import load_csv, write_csv, NoisyDataset
from .errors import FlrError
from .experiment import (
    ExperimentConfig,
    classifier_from_result,
    emit_trace,
    run_experiment,
    sweep,
)
from .noise import NoiseSpec, inject_feature_noise, inject_label_noise
from .prox import l1_norm, l21_norm, nuclear_norm
from .solver import Hyperparams


def _add_hyperparam_flags(parser):
    parser.add_argument("--lambda1", type=float, default=0.1)
    parser.add_argument("--lambda2", type=float, default=0.1)
    parser.add_argument("--lambda3", type=float, default=0.1)
    parser.add_argument("--mu0", type=float, default=1e-3)
    parser.add_argument("--rho", type=float, default=1.2)
    parser.add_argument("--epsilon", type=float, default=1e-6)
    parser.add_argument("--iter-max", type=int, default=1000)
    parser.add_argument("--feature-reg", choices=["l1", "frobenius"], default="l1")
    parser.add_argument(
        "--mu-cap", default="1e12", help="penalty cap, or 'none' for unbounded growth"
    )


def _hyperparams_from(args):
    cap = None if str(args.mu_cap).lower() == "none" else float(args.mu_cap)
    return Hyperparams(
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        lambda3=args.lambda3,
        mu0=args.mu0,
        rho=args.rho,
        epsilon=args.epsilon,
        iter_max=args.iter_max,
        feature_reg=args.feature_reg,
        mu_cap=cap,
    )


def _read_feature_rows(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append([float(v) for v in line.replace(",", " ").split()])
    return np.asarray(rows)


def _cmd_fit(args):
    ds = load_csv(args.dataset, has_header=args.header)
    features = ds.features
    means = scales = None
    if args.standardize:
        means, scales = standardize_fit(features)
        features = standardize_apply(features, means, scales)
    hp = _hyperparams_from(args)
    result = solver.fit(features, ds.labels, hp)
    clf = classifier_from_result(result, means, scales)
    save_classifier(clf, args.model)
    if args.trace:
        emit_trace(result, args.trace)
    print(
        f"termination={result.termination} iterations={result.state.iter} "
        f"final_residual_max={max(result.trace.residuals[-1]):.3e}"
    )
    return 0


def _cmd_predict(args):
    clf = load_classifier(args.model)
    X = _read_feature_rows(args.features)
    labels = predict_batch(clf, X)
    out = sys.stdout if args.out is None else open(args.out, "w")
    try:
        for label in labels:
            out.write(f"{int(label)}\n")
    finally:
        if args.out is not None:
            out.close()
    return 0


def _cmd_inject(args):
    ds = load_csv(args.dataset, has_header=args.header)
    spec = NoiseSpec(
        feature_family=args.family, sigma_f=args.sigma, eta_l=args.eta, seed=args.seed
    )
    corrupted = NoisyDataset(
        inject_feature_noise(ds.features, spec),
        inject_label_noise(ds.labels, spec),
        ds.class_names,
    )
    write_csv(corrupted, args.out)
    print(f"wrote {corrupted.n} rows to {args.out}")
    return 0


def _cmd_run(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    summary = run_experiment(cfg)
    print(
        f"accuracy {summary['accuracy_mean']:.4f} +- {summary['accuracy_std']:.4f} "
        f"(baseline {summary['baseline_accuracy_mean']:.4f}) over "
        f"{summary['completed']}/{summary['trials']} trials -> {cfg.output_dir}"
    )
    return 0


def _cmd_sweep(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    values = [float(v) for v in args.values.split(",")]
    rows = sweep(cfg, args.param, values)
    for row in rows:
        s = row["summary"]
        print(f"{args.param}={row['value']:g}: accuracy {s['accuracy_mean']:.4f}")
    return 0


def _cmd_bound(args):
    if args.inputs:
        with open(args.inputs) as fh:
            b = BoundInputs(**json.load(fh))
    else:
        ds = load_csv(args.dataset, has_header=args.header)
        hp = _hyperparams_from(args)
        result = solver.fit(ds.features, ds.labels, hp)
        if args.model:
            save_classifier(classifier_from_result(result), args.model)
        b = BoundInputs(
            n=ds.n,
            c=ds.c,
            d=ds.d,
            X_star_nuc=nuclear_norm(result.X_star),
            Z_star_nuc=nuclear_norm(result.Z_star),
            El_21=l21_norm(result.E_l_star),
            Ef_1=l1_norm(result.E_f_star),
            Xtilde_F=float(np.linalg.norm(ds.features)),
            lipschitz_L=args.lipschitz,
            loss_bound_B=args.loss_bound,
            delta=args.delta,
        )
    complexity, gap = rademacher_bound(b)
    print(f"complexity {complexity!r}")
    print(f"gap {gap!r}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="flr",
        description="Joint feature/label recovery for classification under hybrid noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the recovery model on a labeled CSV")
    p.add_argument("dataset")
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--trace", help="optional convergence trace CSV")
    p.add_argument("--header", action="store_true", help="dataset has a header row")
    p.add_argument("--standardize", action="store_true")
    _add_hyperparam_flags(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("predict", help="predict class indices for feature rows")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True, help="CSV/whitespace rows of d features")
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("inject", help="corrupt a dataset with hybrid noise")
    p.add_argument("dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--family", choices=["none", "gaussian", "laplacian"], default="gaussian")
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=_cmd_inject)

    p = sub.add_parser("run", help="run a multi-trial experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", help="override the config's output_dir")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep one trade-off weight across values")
    p.add_argument("--config", required=True)
    p.add_argument("--param", choices=["lambda1", "lambda2", "lambda3"], required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--output-dir")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("bound", help="evaluate the generalization-gap bound")
    p.add_argument("--inputs", help="JSON file with the bound inputs")
    p.add_argument("--dataset", help="labeled CSV to fit and evaluate the bound on")
    p.add_argument("--model", help="with --dataset: also save the fitted model here")
    p.add_argument("--header", action="store_true")
    p.add_argument("--lipschitz", type=float, default=1.0)
    p.add_argument("--loss-bound", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.05)
    _add_hyperparam_flags(p)
    p.set_defaults(func=_cmd_bound)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bound" and (args.inputs is None) == (args.dataset is None):
        parser.error("bound needs exactly one of --inputs or --dataset")
    try:
        return args.func(args)
    except FlrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
