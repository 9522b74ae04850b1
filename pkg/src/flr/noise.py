"""Seeded hybrid-noise injection: additive feature noise and symmetric label flips."""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

FAMILY_NONE = "none"
FAMILY_GAUSSIAN = "gaussian"
FAMILY_LAPLACIAN = "laplacian"

_FAMILIES = (FAMILY_NONE, FAMILY_GAUSSIAN, FAMILY_LAPLACIAN)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise configuration: feature family with target standard deviation
    sigma_f, fraction eta_l of examples whose label is flipped, and the seed."""

    feature_family: str = FAMILY_GAUSSIAN
    sigma_f: float = 0.0
    eta_l: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.feature_family not in _FAMILIES:
            raise ValidationError(
                f"feature_family must be one of {_FAMILIES}, got {self.feature_family!r}"
            )
        if self.sigma_f < 0.0:
            raise ValidationError("sigma_f must be nonnegative")
        if not 0.0 <= self.eta_l <= 1.0:
            raise ValidationError("eta_l must lie in [0, 1]")
        if self.seed < 0:
            raise ValidationError("seed must be a nonnegative integer")


def inject_feature_noise(X, spec):
    """Add i.i.d. zero-mean noise with standard deviation sigma_f to every entry.

    The Laplace scale is sigma_f/sqrt(2) so that both families share the same
    standard deviation. Family "none" or sigma_f == 0 returns a copy of X.
    """
    X = np.asarray(X, dtype=float)
    if not np.isfinite(X).all():
        raise ValidationError("feature matrix contains non-finite entries")
    if spec.feature_family == FAMILY_NONE or spec.sigma_f == 0.0:
        return X.copy()
    rng = np.random.default_rng(spec.seed)
    if spec.feature_family == FAMILY_GAUSSIAN:
        noise = rng.normal(0.0, spec.sigma_f, size=X.shape)
    else:
        noise = rng.laplace(0.0, spec.sigma_f / np.sqrt(2.0), size=X.shape)
    return X + noise


def flip_labels(Y, eta_l, rng):
    """Flip floor(eta_l * n) uniformly chosen rows to a uniform other class.

    Returns the flipped one-hot matrix and the boolean mask of changed rows.
    A selected row never keeps its original class, so the realized noise rate
    equals eta_l exactly.
    """
    Y = np.asarray(Y, dtype=float)
    n, c = Y.shape
    k = int(np.floor(eta_l * n))
    mask = np.zeros(n, dtype=bool)
    out = Y.copy()
    if k == 0:
        return out, mask
    if c < 2:
        raise ValidationError("label flipping needs at least two classes")
    rows = rng.choice(n, size=k, replace=False)
    classes = np.argmax(Y, axis=1)
    draws = rng.integers(0, c - 1, size=k)
    for row, draw in zip(rows, draws):
        old = classes[row]
        new = draw if draw < old else draw + 1
        out[row] = 0.0
        out[row, new] = 1.0
    mask[rows] = True
    return out, mask


def inject_label_noise(Y, spec):
    """Symmetric label noise on floor(eta_l * n) seeded-uniformly chosen rows."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise ValidationError("label matrix must be 2-d")
    if not (np.isin(Y, (0.0, 1.0)).all() and np.all(Y.sum(axis=1) == 1.0)):
        raise ValidationError("label matrix rows must be one-hot")
    if Y.shape[1] < 2 and spec.eta_l > 0.0:
        raise ValidationError("cannot flip labels with a single class")
    rng = np.random.default_rng(spec.seed)
    out, _ = flip_labels(Y, spec.eta_l, rng)
    return out
