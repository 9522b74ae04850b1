"""Projection classifier built from the recovered embedding, evaluation
metrics, and the generalization-gap calculator."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError


def standardize_fit(X):
    """Per-feature means and scales (population std); constant features get
    scale 1 so the transform stays invertible."""
    X = np.asarray(X, dtype=float)
    means = X.mean(axis=0)
    scales = X.std(axis=0)
    scales = np.where(scales == 0.0, 1.0, scales)
    return means, scales


def standardize_apply(X, means, scales):
    """Apply a learned per-feature z-scoring."""
    return (np.asarray(X, dtype=float) - means) / scales


@dataclass
class Classifier:
    """Linear projection classifier: class scores are x @ Z, optionally after
    a per-feature standardization fitted on training data."""

    Z: np.ndarray
    means: np.ndarray | None = None
    scales: np.ndarray | None = None

    def __post_init__(self):
        self.Z = np.asarray(self.Z, dtype=float)
        if self.Z.ndim != 2:
            raise ValidationError("projection matrix must be 2-d")
        if not np.isfinite(self.Z).all():
            raise ValidationError("projection matrix contains non-finite entries")
        if (self.means is None) != (self.scales is None):
            raise ValidationError("means and scales must be supplied together")
        if self.means is not None:
            self.means = np.asarray(self.means, dtype=float)
            self.scales = np.asarray(self.scales, dtype=float)
            if self.means.shape != (self.Z.shape[0],) or self.scales.shape != (self.Z.shape[0],):
                raise ValidationError("standardizer length must equal the feature count")
            if not np.all(self.scales > 0.0):
                raise ValidationError("standardizer scales must be positive")

    def scores(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.Z.shape[0]:
            raise ValidationError(
                f"feature length {X.shape[1]} does not match projection rows {self.Z.shape[0]}"
            )
        if not np.isfinite(X).all():
            raise ValidationError("features contain non-finite entries")
        if self.means is not None:
            X = standardize_apply(X, self.means, self.scales)
        return X @ self.Z


def predict(clf, x):
    """Class index with the largest score; ties break to the lowest index."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError("predict expects a single feature row")
    return int(np.argmax(clf.scores(x)[0]))


def predict_batch(clf, X):
    return np.argmax(clf.scores(X), axis=1)


def accuracy(clf, X_test, y_test):
    """Fraction of rows whose prediction equals the stated class index."""
    X_test = np.asarray(X_test, dtype=float)
    y_test = np.asarray(y_test)
    if X_test.shape[0] == 0:
        raise ValidationError("empty test set")
    if y_test.shape[0] != X_test.shape[0]:
        raise ValidationError("feature and label row counts differ")
    return float(np.mean(predict_batch(clf, X_test) == y_test))


def fit_least_squares(X, Y, standardize=False):
    """Naive baseline: one-hot least squares on the data as given."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    means = scales = None
    if standardize:
        means, scales = standardize_fit(X)
        X = standardize_apply(X, means, scales)
    Z, *_ = np.linalg.lstsq(X, Y, rcond=None)
    return Classifier(Z=Z, means=means, scales=scales)


@dataclass(frozen=True)
class BoundInputs:
    """Quantities entering the generalization-gap evaluation: problem sizes,
    the four norm budgets of the fitted recovery, the observed-feature
    Frobenius norm, and the user-supplied loss constants."""

    n: int
    c: int
    d: int
    X_star_nuc: float
    Z_star_nuc: float
    El_21: float
    Ef_1: float
    Xtilde_F: float
    lipschitz_L: float = 1.0
    loss_bound_B: float = 1.0
    delta: float = 0.05

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValidationError("n and d must be >= 1")
        if self.c < 2:
            raise ValidationError("the bound needs at least two classes")
        for name in ("X_star_nuc", "Z_star_nuc", "El_21", "Ef_1", "Xtilde_F"):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"{name} must be nonnegative")
        if self.lipschitz_L < 0.0 or self.loss_bound_B < 0.0:
            raise ValidationError("loss constants must be nonnegative")
        if not 0.0 < self.delta < 1.0:
            raise ValidationError("delta must lie strictly inside (0, 1)")

    @property
    def n_c(self):
        return max(self.n, self.c)


def rademacher_bound(b):
    """Complexity term and high-probability generalization gap.

    complexity = El_21*C1 + min(Xnuc*Znuc*C2, Znuc*(XtF + sqrt(d)*Ef1)*C3, C4)
    with C1 = sqrt(3 ln c / (nc)), C2 = sqrt(ln(2 n_c) / (nc)),
    C3 = 1/sqrt(nc), C4 = sqrt(2/c); the gap adds the confidence term
    B * sqrt(ln(1/delta) / (2nc)) to 2 * L * complexity.
    """
    nc = b.n * b.c
    c1 = math.sqrt(3.0 * math.log(b.c) / nc)
    c2 = math.sqrt(math.log(2.0 * b.n_c) / nc)
    c3 = 1.0 / math.sqrt(nc)
    c4 = math.sqrt(2.0 / b.c)
    complexity = b.El_21 * c1 + min(
        b.X_star_nuc * b.Z_star_nuc * c2,
        b.Z_star_nuc * (b.Xtilde_F + math.sqrt(b.d) * b.Ef_1) * c3,
        c4,
    )
    gap = 2.0 * b.lipschitz_L * complexity + b.loss_bound_B * math.sqrt(
        math.log(1.0 / b.delta) / (2.0 * nc)
    )
    return complexity, gap


def save_classifier(clf, path):
    """Columnar text format: 'd c has_standardizer' header, then the d rows
    of Z, then (optionally) d 'mean scale' rows."""
    d, c = clf.Z.shape
    flag = 1 if clf.means is not None else 0
    with open(path, "w") as fh:
        fh.write(f"{d} {c} {flag}\n")
        for row in clf.Z:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        if flag:
            for m, s in zip(clf.means, clf.scales):
                fh.write(f"{float(m)!r} {float(s)!r}\n")


def load_classifier(path):
    """Inverse of save_classifier."""
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise ParseError(f"empty model file {path}")
    try:
        d, c, flag = (int(v) for v in lines[0].split())
    except ValueError as exc:
        raise ParseError(f"bad model header: {exc}", row=1) from exc
    expected = 1 + d + (d if flag else 0)
    if len(lines) != expected:
        raise ParseError(f"model file has {len(lines)} lines, expected {expected}")
    try:
        Z = np.asarray([[float(v) for v in lines[1 + i].split()] for i in range(d)])
        means = scales = None
        if flag:
            pairs = [[float(v) for v in lines[1 + d + i].split()] for i in range(d)]
            means = np.asarray([p[0] for p in pairs])
            scales = np.asarray([p[1] for p in pairs])
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad model body: {exc}") from exc
    if Z.shape != (d, c):
        raise ParseError(f"model body shape {Z.shape} does not match header ({d}, {c})")
    return Classifier(Z=Z, means=means, scales=scales)
