import json

import numpy as np
import pytest

import flr.experiment as experiment
from flr import (
    ExperimentConfig,
    Hyperparams,
    NoiseSpec,
    NumericError,
    ValidationError,
    corrupt_training_split,
    emit_trace,
    fit,
    make_planted,
    mu_schedule,
    run_experiment,
    split,
    sweep,
)


def _config(tmp_path, **overrides):
    base = dict(
        planted={"n": 80, "d": 8, "c": 3, "rank": 4, "seed": 5},
        noise=NoiseSpec(feature_family="gaussian", sigma_f=0.2, eta_l=0.2, seed=100),
        hyperparams=Hyperparams(iter_max=300),
        trials=2,
        train_fraction=0.8,
        output_dir=str(tmp_path / "out"),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation(tmp_path):
    with pytest.raises(ValidationError):
        ExperimentConfig(dataset=None, planted=None)
    with pytest.raises(ValidationError):
        ExperimentConfig(dataset="a.csv", planted={"n": 4})
    with pytest.raises(ValidationError):
        _config(tmp_path, trials=0)
    with pytest.raises(ValidationError):
        _config(tmp_path, ablation="sideways")
    with pytest.raises(ValidationError):
        run_experiment(_config(tmp_path, planted={"n": 10, "d": 4}))


def test_config_json_round_trip(tmp_path):
    cfg = _config(tmp_path, hyperparams=Hyperparams(mu_cap=None))
    path = tmp_path / "cfg.json"
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh)
    back = ExperimentConfig.from_json(path)
    assert back.hyperparams == cfg.hyperparams
    assert back.noise == cfg.noise
    assert back.planted == cfg.planted


def test_noise_touches_training_rows_only():
    inst = make_planted(60, 6, 3, 4, sparsity=0.0, eta_l=0.0, seed=1)
    ds = inst.noisy
    noise = NoiseSpec(feature_family="gaussian", sigma_f=0.5, eta_l=0.5, seed=9)
    train, test = corrupt_training_split(ds, 0.8, noise, seed=9)
    _, clean_test = split(ds, 0.8, seed=9)
    assert np.array_equal(test.features, clean_test.features)
    assert np.array_equal(test.labels, clean_test.labels)
    clean_train, _ = split(ds, 0.8, seed=9)
    assert not np.array_equal(train.features, clean_train.features)
    assert not np.array_equal(train.labels, clean_train.labels)


def test_run_experiment_outputs_and_summary(tmp_path):
    cfg = _config(tmp_path)
    summary = run_experiment(cfg)
    out = tmp_path / "out"
    assert (out / "config.json").exists()
    assert (out / "summary.json").exists()
    assert (out / "timings.json").exists()
    for t in range(cfg.trials):
        assert (out / f"trial_{t}" / "metrics.json").exists()
        assert (out / f"trial_{t}" / "trace.csv").exists()
    # summary stats match a recomputation from the per-trial files
    accs = []
    for t in range(cfg.trials):
        with open(out / f"trial_{t}" / "metrics.json") as fh:
            accs.append(json.load(fh)["accuracy"])
    accs = np.asarray(accs)
    assert abs(summary["accuracy_mean"] - accs.mean()) <= 1e-12
    assert abs(summary["accuracy_std"] - accs.std()) <= 1e-12


def test_run_experiment_deterministic_artifacts(tmp_path):
    cfg_a = _config(tmp_path, output_dir=str(tmp_path / "a"))
    cfg_b = _config(tmp_path, output_dir=str(tmp_path / "b"))
    run_experiment(cfg_a)
    run_experiment(cfg_b)
    for rel in ("summary.json", "trial_0/metrics.json", "trial_0/trace.csv",
                "trial_1/metrics.json", "trial_1/trace.csv"):
        a = (tmp_path / "a" / rel).read_bytes()
        b = (tmp_path / "b" / rel).read_bytes()
        assert a == b, f"{rel} differs between identical runs"


def test_clean_planted_reaches_high_accuracy(tmp_path):
    cfg = _config(
        tmp_path,
        planted={"n": 200, "d": 20, "c": 4, "rank": 4, "seed": 11},
        noise=NoiseSpec(feature_family="none", sigma_f=0.0, eta_l=0.0, seed=0),
        hyperparams=Hyperparams(lambda1=2.0, lambda2=0.1, lambda3=0.05),
        trials=5,
    )
    summary = run_experiment(cfg)
    assert summary["accuracy_mean"] >= 0.99


def test_ablation_runs_and_pins(tmp_path):
    inst = make_planted(60, 6, 3, 4, sparsity=0.0, eta_l=0.2, seed=2)
    hp = Hyperparams(iter_max=200)
    no_feat = fit(inst.noisy.features, inst.noisy.labels, hp, pin_feature_error=True)
    assert not no_feat.E_f_star.any()
    cfg = _config(tmp_path, ablation="no_label_recovery")
    summary = run_experiment(cfg)
    assert summary["completed"] == cfg.trials


def test_emit_trace_columns_and_schedule(tmp_path):
    inst = make_planted(30, 5, 2, 3, sparsity=0.0, eta_l=0.0, seed=3)
    hp = Hyperparams(iter_max=12)
    result = fit(inst.noisy.features, inst.noisy.labels, hp)
    path = tmp_path / "trace.csv"
    emit_trace(result, path)
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header == ["iteration", "res_xef", "res_ybel", "res_zj", "res_bkj", "res_xk",
                      "objective", "mu"]
    assert len(lines) == 1 + 12 + 1  # header + initial row + one per iteration
    for t, line in enumerate(lines[1:]):
        fields = line.split(",")
        assert int(fields[0]) == t
        assert float(fields[7]) == mu_schedule(hp, t)


def test_emit_trace_converged_run_ends_below_epsilon(tmp_path):
    inst = make_planted(40, 6, 2, 3, sparsity=0.0, eta_l=0.0, seed=4)
    result = fit(inst.noisy.features, inst.noisy.labels, Hyperparams())
    path = tmp_path / "trace.csv"
    emit_trace(result, path)
    last = path.read_text().strip().splitlines()[-1].split(",")
    assert all(float(v) <= 1e-6 for v in last[1:6])


def test_emit_trace_on_untouched_fit(tmp_path):
    inst = make_planted(10, 4, 2, 3, sparsity=0.0, eta_l=0.0, seed=5)
    result = fit(inst.noisy.features, inst.noisy.labels, Hyperparams(iter_max=0))
    path = tmp_path / "trace0.csv"
    emit_trace(result, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 2  # header plus the initial-state row
    assert lines[1].startswith("0,")


def test_converged_trial_metrics_respect_epsilon(tmp_path):
    cfg = _config(tmp_path, output_dir=str(tmp_path / "eps"))
    summary = run_experiment(cfg)
    for m in summary["per_trial"]:
        if m["termination"] == "converged":
            assert max(m["final_residuals"]) <= cfg.hyperparams.epsilon


def test_sweep_single_value_matches_plain_run(tmp_path):
    cfg = _config(tmp_path, output_dir=str(tmp_path / "sweep"))
    rows = sweep(cfg, "lambda3", [0.1])
    plain = run_experiment(_config(tmp_path, output_dir=str(tmp_path / "plain")))
    assert rows[0]["summary"]["accuracy_mean"] == plain["accuracy_mean"]


def test_sweep_emits_rows_in_value_order(tmp_path):
    cfg = _config(tmp_path, output_dir=str(tmp_path / "sweep3"))
    values = [0.05, 0.1, 0.5]
    rows = sweep(cfg, "lambda3", values)
    assert [r["value"] for r in rows] == values
    table = (tmp_path / "sweep3" / "sweep.csv").read_text().strip().splitlines()
    assert len(table) == 4
    assert [float(line.split(",")[0]) for line in table[1:]] == values


def test_sweep_validation(tmp_path):
    cfg = _config(tmp_path)
    with pytest.raises(ValidationError):
        sweep(cfg, "mu0", [1.0])
    with pytest.raises(ValidationError):
        sweep(cfg, "lambda1", [])


def test_sweep_lambda3_accuracy_band(tmp_path):
    # accuracy stays within a 15-point band across three decades of lambda3
    cfg = ExperimentConfig(
        planted={"n": 200, "d": 20, "c": 4, "rank": 4, "seed": 31},
        noise=NoiseSpec(feature_family="none", sigma_f=0.0, eta_l=0.3, seed=10),
        hyperparams=Hyperparams(lambda1=2.0, lambda2=0.1),
        trials=3,
        output_dir=str(tmp_path / "band"),
    )
    rows = sweep(cfg, "lambda3", [0.01, 0.1, 1.0])
    accs = [r["summary"]["accuracy_mean"] for r in rows]
    assert max(accs) - min(accs) <= 0.15


def test_trial_failure_recorded_and_run_continues(tmp_path, monkeypatch):
    cfg = _config(tmp_path, trials=3)
    real_fit = experiment.solver.fit
    calls = {"k": 0}

    def flaky(*args, **kwargs):
        calls["k"] += 1
        if calls["k"] == 1:
            raise NumericError("synthetic failure")
        return real_fit(*args, **kwargs)

    monkeypatch.setattr(experiment.solver, "fit", flaky)
    summary = run_experiment(cfg)
    assert summary["completed"] == 2
    assert summary["failures"][0]["trial"] == 0


def test_all_trials_failed_raises(tmp_path, monkeypatch):
    cfg = _config(tmp_path, trials=2)

    def always_fail(*args, **kwargs):
        raise NumericError("synthetic failure")

    monkeypatch.setattr(experiment.solver, "fit", always_fail)
    with pytest.raises(NumericError):
        run_experiment(cfg)
