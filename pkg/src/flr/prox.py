"""Closed-form proximal and projection operators used by the solver blocks.

All operators are pure: they never mutate their arguments and are safe to
call concurrently.
"""

import numpy as np

from .errors import NumericError, ValidationError


def _as_finite_matrix(m, name):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"{name} must have at least one row and column")
    if not np.isfinite(m).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return m


def _check_threshold(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ValidationError(f"{name} must be a finite nonnegative real, got {value}")
    return value


def svt(m, tau):
    """Singular value thresholding: shrink every singular value by ``tau``.

    Minimizes tau*||X||_* + 0.5*||X - m||_F^2.
    """
    m = _as_finite_matrix(m, "svt operand")
    tau = _check_threshold(tau, "tau")
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"SVD did not converge for {m.shape[0]}x{m.shape[1]} operand "
            f"(fro norm {np.linalg.norm(m):.6g})"
        ) from exc
    s = np.maximum(s - tau, 0.0)
    return (u * s) @ vt


def soft_threshold(m, omega):
    """Entrywise shrinkage sign(e)*max(|e| - omega, 0).

    Minimizes omega*||E||_1 + 0.5*||E - m||_F^2.
    """
    m = _as_finite_matrix(m, "soft_threshold operand")
    omega = _check_threshold(omega, "omega")
    return np.sign(m) * np.maximum(np.abs(m) - omega, 0.0)


def row_shrink(m, xi):
    """Shrink each row toward zero by ``xi`` in Euclidean norm.

    Minimizes xi*||E||_{2,1} + 0.5*||E - m||_F^2. Rows with norm <= xi
    (including zero rows) map to zero rows.
    """
    m = _as_finite_matrix(m, "row_shrink operand")
    xi = _check_threshold(xi, "xi")
    norms = np.linalg.norm(m, axis=1)
    scale = np.zeros_like(norms)
    active = norms > xi
    scale[active] = (norms[active] - xi) / norms[active]
    return m * scale[:, None]


def clamp01(m):
    """Entrywise projection onto [0, 1]."""
    m = _as_finite_matrix(m, "clamp01 operand")
    return np.clip(m, 0.0, 1.0)


def nuclear_norm(m):
    """Sum of singular values."""
    m = _as_finite_matrix(m, "nuclear_norm operand")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def l1_norm(m):
    """Entrywise absolute sum."""
    return float(np.abs(np.asarray(m, dtype=float)).sum())


def l21_norm(m):
    """Sum of Euclidean row norms."""
    return float(np.linalg.norm(np.asarray(m, dtype=float), axis=1).sum())
