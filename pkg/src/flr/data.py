"""Dataset ingestion, splitting, and the planted low-rank benchmark generator."""

import csv
import os
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError
from .noise import flip_labels

# Planted-cluster geometry: class centroids sit at regular-simplex vertices in
# the latent space, scaled SEPARATION apart, with isotropic SPREAD around them.
SEPARATION = 4.0
SPREAD = 0.8


@dataclass
class NoisyDataset:
    """Feature matrix with one-hot labels and optional class names."""

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str] | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2 or self.labels.ndim != 2:
            raise ValidationError("features and labels must be 2-d matrices")
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValidationError("features and labels must have equal row counts")
        if self.features.shape[0] < 1 or self.features.shape[1] < 1 or self.labels.shape[1] < 1:
            raise ValidationError("dataset must have at least one row, feature and class")
        if not np.isfinite(self.features).all():
            raise ValidationError("features contain non-finite entries")
        onehot = np.isin(self.labels, (0.0, 1.0)).all() and np.all(self.labels.sum(axis=1) == 1.0)
        if not onehot:
            raise ValidationError("label rows must be one-hot")
        if self.class_names is not None and len(self.class_names) != self.labels.shape[1]:
            raise ValidationError("class_names length must equal the class count")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def c(self):
        return self.labels.shape[1]

    def class_indices(self):
        return np.argmax(self.labels, axis=1)

    def take(self, rows):
        return NoisyDataset(self.features[rows], self.labels[rows], self.class_names)


@dataclass
class PlantedInstance:
    """Ground-truth bundle from the planted generator: the clean dataset, its
    corrupted counterpart, the exact feature-error matrix, and the mask of
    rows whose label was flipped."""

    clean: NoisyDataset
    noisy: NoisyDataset
    feature_errors: np.ndarray
    flip_mask: np.ndarray


def load_csv(path, has_header=False):
    """Read rows of d numeric fields followed by one label field.

    Labels may be arbitrary strings; classes are indexed in first-appearance
    order and one-hot encoded.
    """
    features = []
    raw_labels = []
    width = None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 and has_header:
                continue
            if not row:
                continue
            if len(row) < 2:
                raise ParseError("expected at least one feature and a label", row=lineno)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ParseError(
                    f"expected {width} fields, found {len(row)}", row=lineno
                )
            try:
                features.append([float(v) for v in row[:-1]])
            except ValueError as exc:
                raise ParseError(f"non-numeric feature value: {exc}", row=lineno) from exc
            raw_labels.append(row[-1].strip())
    if not features:
        raise ParseError(f"no data rows in {path}")
    class_names = []
    index = {}
    for name in raw_labels:
        if name not in index:
            index[name] = len(class_names)
            class_names.append(name)
    c = len(class_names)
    labels = np.zeros((len(raw_labels), c))
    for i, name in enumerate(raw_labels):
        labels[i, index[name]] = 1.0
    return NoisyDataset(np.asarray(features), labels, class_names)


def write_csv(ds, path):
    """Mirror of load_csv: d feature fields then the label name (or index)."""
    names = ds.class_names or [str(j) for j in range(ds.c)]
    indices = ds.class_indices()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i in range(ds.n):
            writer.writerow([repr(float(v)) for v in ds.features[i]] + [names[indices[i]]])


def split(ds, train_fraction, seed):
    """Seeded uniform shuffle; the first floor(train_fraction * n) rows form
    the training set, the rest the test set."""
    if not 0.0 < train_fraction < 1.0:
        raise ValidationError("train_fraction must lie strictly between 0 and 1")
    n = ds.n
    n_train = int(np.floor(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ValidationError(
            f"split of {n} rows at fraction {train_fraction} leaves an empty side"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return ds.take(perm[:n_train]), ds.take(perm[n_train:])


def _class_directions(c, dim, rng):
    """Unit class-centroid directions: a randomly rotated regular simplex when
    it fits (c - 1 <= dim), otherwise normalized random directions."""
    if c == 1:
        return np.zeros((dim, 1))
    if c - 1 <= dim:
        vertices = np.vstack(
            [np.eye(c - 1), np.full(c - 1, (1.0 - np.sqrt(c)) / (c - 1))]
        )
        vertices -= vertices.mean(axis=0)
        vertices /= np.linalg.norm(vertices, axis=1, keepdims=True)
        rot, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        directions = np.zeros((dim, c))
        directions[: c - 1] = vertices.T
        return rot @ directions
    directions = rng.normal(size=(dim, c))
    return directions / np.linalg.norm(directions, axis=0, keepdims=True)


def make_planted(n, d, c, rank, sparsity, eta_l, seed):
    """Planted benchmark: exact-rank clean features from clustered latent
    factors, plus seeded sparse feature corruption and label flips.

    The clean matrix is A @ B^T with A = [1 | G]: a constant latent
    coordinate (so one-hot targets are affinely reachable) and latent points
    G clustered around per-class simplex directions. Entries are scaled to
    unit variance. Exactly floor(sparsity * n * d) entries of the feature
    error are nonzero, with seeded signs and magnitudes.
    """
    if n < 1 or d < 1 or c < 1:
        raise ValidationError("n, d, c must all be >= 1")
    if rank < 1 or rank > min(n, d):
        raise ValidationError(f"rank must lie in [1, min(n, d)] = [1, {min(n, d)}]")
    if not 0.0 <= sparsity < 1.0:
        raise ValidationError("sparsity must lie in [0, 1)")
    if not 0.0 <= eta_l <= 1.0:
        raise ValidationError("eta_l must lie in [0, 1]")
    if c > 1 and rank < 2:
        raise ValidationError("rank must be >= 2 to realize more than one class")

    rng = np.random.default_rng(seed)
    lat = rank - 1 if rank >= 2 else 1
    directions = _class_directions(c, lat, rng)
    y = rng.integers(0, c, size=n) if c > 1 else np.zeros(n, dtype=int)
    G = SEPARATION * directions[:, y].T + SPREAD * rng.normal(size=(n, lat))
    A = np.hstack([np.ones((n, 1)), G]) if rank >= 2 else G
    B = rng.normal(size=(d, rank))
    # entry variance of A @ B^T is (1 + SEP^2 + lat*SPREAD^2); normalize to ~1
    scale = 1.0 / np.sqrt(1.0 + SEPARATION**2 + lat * SPREAD**2)
    X_clean = A @ B.T * scale

    Y_clean = np.zeros((n, c))
    Y_clean[np.arange(n), y] = 1.0

    k = int(np.floor(sparsity * n * d))
    E_f = np.zeros(n * d)
    if k:
        positions = rng.choice(n * d, size=k, replace=False)
        E_f[positions] = rng.choice([-1.0, 1.0], size=k) * rng.uniform(1.0, 3.0, size=k)
    E_f = E_f.reshape(n, d)

    if eta_l > 0.0 and c < 2:
        raise ValidationError("cannot flip labels with a single class")
    Y_noisy, flip_mask = flip_labels(Y_clean, eta_l, rng)

    clean = NoisyDataset(X_clean, Y_clean)
    noisy = NoisyDataset(X_clean + E_f, Y_noisy)
    return PlantedInstance(clean=clean, noisy=noisy, feature_errors=E_f, flip_mask=flip_mask)


def _write_matrix(path, m):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(m):
            writer.writerow([repr(float(v)) for v in row])


def _read_matrix(path):
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise ParseError(f"no rows in {path}")
    return np.asarray(rows)


def save_planted(inst, directory):
    """Serialize a planted instance as features.csv (clean X), labels.csv
    (clean and noisy class index per row), ef.csv and flips.csv."""
    os.makedirs(directory, exist_ok=True)
    _write_matrix(os.path.join(directory, "features.csv"), inst.clean.features)
    clean_idx = inst.clean.class_indices()
    noisy_idx = inst.noisy.class_indices()
    with open(os.path.join(directory, "labels.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        for a, b in zip(clean_idx, noisy_idx):
            writer.writerow([int(a), int(b)])
    _write_matrix(os.path.join(directory, "ef.csv"), inst.feature_errors)
    with open(os.path.join(directory, "flips.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        for v in inst.flip_mask:
            writer.writerow([int(v)])


def load_planted(directory):
    """Inverse of save_planted."""
    X_clean = _read_matrix(os.path.join(directory, "features.csv"))
    with open(os.path.join(directory, "labels.csv"), newline="") as fh:
        pairs = [(int(a), int(b)) for a, b in csv.reader(fh)]
    E_f = _read_matrix(os.path.join(directory, "ef.csv"))
    with open(os.path.join(directory, "flips.csv"), newline="") as fh:
        mask = np.asarray([bool(int(row[0])) for row in csv.reader(fh) if row])
    c = max(max(a for a, _ in pairs), max(b for _, b in pairs)) + 1
    n = len(pairs)
    Y_clean = np.zeros((n, c))
    Y_noisy = np.zeros((n, c))
    for i, (a, b) in enumerate(pairs):
        Y_clean[i, a] = 1.0
        Y_noisy[i, b] = 1.0
    clean = NoisyDataset(X_clean, Y_clean)
    noisy = NoisyDataset(X_clean + E_f, Y_noisy)
    return PlantedInstance(clean=clean, noisy=noisy, feature_errors=E_f, flip_mask=mask)
