import numpy as np
import pytest
from scipy.stats import chisquare

from flr import NoiseSpec, ValidationError, inject_feature_noise, inject_label_noise
from oracles import one_hot


def test_spec_validation():
    with pytest.raises(ValidationError):
        NoiseSpec(feature_family="poisson")
    with pytest.raises(ValidationError):
        NoiseSpec(sigma_f=-0.1)
    with pytest.raises(ValidationError):
        NoiseSpec(eta_l=1.5)


def test_zero_sigma_returns_input_exactly():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(5, 4))
    out = inject_feature_noise(X, NoiseSpec(sigma_f=0.0, seed=3))
    assert np.array_equal(out, X)
    assert out is not X
    out = inject_feature_noise(X, NoiseSpec(feature_family="none", sigma_f=2.0, seed=3))
    assert np.array_equal(out, X)


def test_feature_noise_deterministic():
    X = np.zeros((10, 10))
    spec = NoiseSpec(feature_family="gaussian", sigma_f=0.7, seed=11)
    assert np.array_equal(inject_feature_noise(X, spec), inject_feature_noise(X, spec))
    other = NoiseSpec(feature_family="gaussian", sigma_f=0.7, seed=12)
    assert not np.array_equal(inject_feature_noise(X, spec), inject_feature_noise(X, other))


@pytest.mark.parametrize("family", ["gaussian", "laplacian"])
def test_feature_noise_std_within_one_percent(family):
    X = np.zeros((1000, 1000))
    spec = NoiseSpec(feature_family=family, sigma_f=0.5, seed=7)
    noise = inject_feature_noise(X, spec) - X
    assert abs(noise.std() - 0.5) / 0.5 <= 0.01
    assert abs(noise.mean()) <= 0.01


def test_label_noise_eta_zero_identity():
    Y = one_hot([0, 1, 2, 0], 3)
    out = inject_label_noise(Y, NoiseSpec(eta_l=0.0, seed=0))
    assert np.array_equal(out, Y)


def test_label_noise_eta_one_two_classes_flips_all():
    Y = one_hot([0, 1, 1, 0, 1], 2)
    out = inject_label_noise(Y, NoiseSpec(eta_l=1.0, seed=0))
    assert np.array_equal(out, 1.0 - Y)


def test_label_noise_changes_exact_floor_count():
    rng = np.random.default_rng(1)
    Y = one_hot(rng.integers(0, 4, size=103), 4)
    out = inject_label_noise(Y, NoiseSpec(eta_l=0.3, seed=5))
    changed = np.any(out != Y, axis=1)
    assert changed.sum() == int(np.floor(0.3 * 103))
    # changed rows never keep the original class and stay one-hot
    assert np.all(out[changed].argmax(axis=1) != Y[changed].argmax(axis=1))
    assert np.all(out.sum(axis=1) == 1.0)
    assert np.isin(out, (0.0, 1.0)).all()


def test_label_noise_deterministic():
    Y = one_hot(np.arange(20) % 5, 5)
    spec = NoiseSpec(eta_l=0.5, seed=42)
    assert np.array_equal(inject_label_noise(Y, spec), inject_label_noise(Y, spec))


def test_label_noise_single_class_rejected():
    Y = np.ones((4, 1))
    with pytest.raises(ValidationError):
        inject_label_noise(Y, NoiseSpec(eta_l=0.5, seed=0))
    # eta 0 with one class is fine
    out = inject_label_noise(Y, NoiseSpec(eta_l=0.0, seed=0))
    assert np.array_equal(out, Y)


def test_label_noise_alternatives_uniform():
    n, c = 1000, 10
    Y = one_hot(np.random.default_rng(2).integers(0, c, size=n), c)
    out = inject_label_noise(Y, NoiseSpec(eta_l=0.3, seed=9))
    changed = np.any(out != Y, axis=1)
    assert changed.sum() == 300
    old = Y[changed].argmax(axis=1)
    new = out[changed].argmax(axis=1)
    # map each new class to its alternative slot 0..c-2 relative to the old class
    slots = np.where(new < old, new, new - 1)
    counts = np.bincount(slots, minlength=c - 1)
    assert chisquare(counts).pvalue > 0.01
