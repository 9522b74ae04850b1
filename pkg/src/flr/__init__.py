"""Joint feature and label recovery for classification under hybrid noise.

A non-convex ADMM jointly recovers a low-rank clean feature matrix, a
corrected label matrix and a linear projection classifier from data whose
features and labels are both corrupted, together with the experiment
machinery (noise injection, planted benchmarks, trials, ablations) and a
Rademacher-complexity generalization-gap calculator.
"""

from .classify import (
    BoundInputs,
    Classifier,
    accuracy,
    fit_least_squares,
    load_classifier,
    predict,
    predict_batch,
    rademacher_bound,
    save_classifier,
    standardize_apply,
    standardize_fit,
)
from .data import NoisyDataset, PlantedInstance, load_csv, load_planted, make_planted, save_planted, split, write_csv
from .errors import DivergenceError, FlrError, NumericError, ParseError, ValidationError
from .experiment import ExperimentConfig, corrupt_training_split, emit_trace, run_experiment, sweep
from .noise import NoiseSpec, inject_feature_noise, inject_label_noise
from .prox import clamp01, l1_norm, l21_norm, nuclear_norm, row_shrink, soft_threshold, svt
from .solver import (
    ConvergenceTrace,
    FitResult,
    Hyperparams,
    SolverState,
    augmented_lagrangian,
    fit,
    init_state,
    mu_schedule,
    objective_value,
    residuals,
    update_B,
    update_Ef,
    update_El,
    update_J,
    update_K,
    update_X,
    update_Z,
    update_multipliers_and_mu,
)

__version__ = "0.1.0"
