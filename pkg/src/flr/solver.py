"""Seven-block non-convex ADMM for joint feature/label recovery.

The constrained program couples a low-rank clean feature matrix X, a
low-rank projection Z, a box-constrained label embedding B and two error
matrices (entrywise-sparse E_f, row-sparse E_l) through five equality
constraints with multipliers M1..M5 and a geometrically growing penalty mu.
Each block has a closed-form minimizer; the loop applies them in a fixed
Gauss-Seidel order, then ascends the multipliers.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve as spd_solve

from .errors import DivergenceError, NumericError, ValidationError
from .prox import clamp01, l1_norm, l21_norm, nuclear_norm, row_shrink, soft_threshold, svt

FEATURE_REG_L1 = "l1"
FEATURE_REG_FROBENIUS = "frobenius"

TERMINATION_CONVERGED = "converged"
TERMINATION_ITER_MAX = "iter_max"


@dataclass(frozen=True)
class Hyperparams:
    """Trade-off weights and schedule constants for the solver."""

    lambda1: float = 0.1
    lambda2: float = 0.1
    lambda3: float = 0.1
    mu0: float = 1e-3
    rho: float = 1.2
    epsilon: float = 1e-6
    iter_max: int = 1000
    feature_reg: str = FEATURE_REG_L1
    mu_cap: float | None = 1e12
    relative_residuals: bool = False

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "lambda3"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        if not self.mu0 > 0.0:
            raise ValidationError("mu0 must be positive")
        if not self.rho > 1.0:
            raise ValidationError("rho must exceed 1")
        if not self.epsilon > 0.0:
            raise ValidationError("epsilon must be positive")
        if self.iter_max < 0:
            raise ValidationError("iter_max must be nonnegative")
        if self.feature_reg not in (FEATURE_REG_L1, FEATURE_REG_FROBENIUS):
            raise ValidationError(f"unknown feature_reg {self.feature_reg!r}")
        if self.mu_cap is not None and not self.mu_cap >= self.mu0:
            raise ValidationError("mu_cap must be None or >= mu0")


@dataclass
class SolverState:
    """All iterates of one solver run: seven primal blocks, five multipliers,
    the penalty weight and the iteration counter."""

    X: np.ndarray
    Z: np.ndarray
    B: np.ndarray
    J: np.ndarray
    K: np.ndarray
    E_f: np.ndarray
    E_l: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    M3: np.ndarray
    M4: np.ndarray
    M5: np.ndarray
    mu: float
    iter: int


@dataclass
class ConvergenceTrace:
    """Per-iteration residuals, objective value and penalty weight.

    Row 0 describes the initial (all-zero) state; row t the state after
    iteration t. ``block_shifts`` holds the scaled block movements
    mu_t*||K_{t+1}-K_t||_F (and likewise for J, E_f, E_l): the stationarity
    diagnostics the convergence guarantee assumes vanish. They are recorded
    for inspection only and never gate termination.
    """

    iterations: list[int] = field(default_factory=list)
    residuals: list[tuple[float, float, float, float, float]] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    mu: list[float] = field(default_factory=list)
    block_shifts: list[tuple[float, float, float, float]] = field(default_factory=list)

    def append(self, iteration, res, obj, mu, shifts=(0.0, 0.0, 0.0, 0.0)):
        self.iterations.append(int(iteration))
        self.residuals.append(tuple(float(r) for r in res))
        self.objective.append(float(obj))
        self.mu.append(float(mu))
        self.block_shifts.append(tuple(float(s) for s in shifts))

    def __len__(self):
        return len(self.iterations)


@dataclass
class FitResult:
    """Converged iterates plus the recorded trace and termination reason."""

    X_star: np.ndarray
    Z_star: np.ndarray
    E_f_star: np.ndarray
    E_l_star: np.ndarray
    trace: ConvergenceTrace
    termination: str
    state: SolverState


def init_state(n, d, c, hp):
    """All-zero iterates of the shapes implied by an n x d feature matrix
    and an n x c label matrix; mu at its initial value."""
    if n < 1 or d < 1 or c < 1:
        raise ValidationError(f"dimensions must be >= 1, got n={n}, d={d}, c={c}")
    zeros = np.zeros
    return SolverState(
        X=zeros((n, d)),
        Z=zeros((d, c)),
        B=zeros((n, c)),
        J=zeros((d, c)),
        K=zeros((n, d)),
        E_f=zeros((n, d)),
        E_l=zeros((n, c)),
        M1=zeros((n, d)),
        M2=zeros((n, c)),
        M3=zeros((d, c)),
        M4=zeros((n, c)),
        M5=zeros((n, d)),
        mu=float(hp.mu0),
        iter=0,
    )


def update_X(state, Xtilde):
    """Nuclear-norm prox of the averaged feature target at threshold 1/(2mu)."""
    mu = state.mu
    Xhat = (mu * (Xtilde - state.E_f + state.K) - state.M5 + state.M1) / (2.0 * mu)
    try:
        return svt(Xhat, 1.0 / (2.0 * mu))
    except NumericError as exc:
        raise NumericError(f"X update failed: {exc}") from exc


def update_Z(state, hp):
    """Nuclear-norm prox of J - M3/mu at threshold lambda1/mu."""
    mu = state.mu
    try:
        return svt(state.J - state.M3 / mu, hp.lambda1 / mu)
    except NumericError as exc:
        raise NumericError(f"Z update failed: {exc}") from exc


def update_B(state, Ytilde, project=True):
    """Unconstrained quadratic minimizer, then entrywise projection to [0,1].

    ``project=False`` returns the raw stationary point (diagnostics only)."""
    mu = state.mu
    Bstar = (mu * (Ytilde - state.E_l + state.K @ state.J) + state.M2 - state.M4) / (2.0 * mu)
    return clamp01(Bstar) if project else Bstar


def update_J(state):
    """Solve (I + K^T K) J = Z + K^T B + (M3 + K^T M4)/mu via SPD factorization."""
    mu = state.mu
    K = state.K
    lhs = np.eye(K.shape[1]) + K.T @ K
    rhs = state.Z + K.T @ state.B + (state.M3 + K.T @ state.M4) / mu
    try:
        return spd_solve(lhs, rhs, assume_a="pos")
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"J update linear solve failed: {exc}") from exc


def update_K(state):
    """Solve K (J J^T + I) = (M4 J^T + M5)/mu + B J^T + X via SPD factorization."""
    mu = state.mu
    J = state.J
    lhs = J @ J.T + np.eye(J.shape[0])
    rhs = (state.M4 @ J.T + state.M5) / mu + state.B @ J.T + state.X
    try:
        return spd_solve(lhs, rhs.T, assume_a="pos").T
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"K update linear solve failed: {exc}") from exc


def update_Ef(state, Xtilde, hp):
    """Feature-error prox: entrywise shrinkage for the l1 regularizer, or the
    closed-form ridge shrink mu/(mu + 2*lambda2) for the Frobenius one."""
    mu = state.mu
    Ef_hat = Xtilde - state.X + state.M1 / mu
    if hp.feature_reg == FEATURE_REG_L1:
        return soft_threshold(Ef_hat, hp.lambda2 / mu)
    return mu * Ef_hat / (mu + 2.0 * hp.lambda2)


def update_El(state, Ytilde, hp):
    """Row-sparse label-error prox at threshold lambda3/mu."""
    mu = state.mu
    return row_shrink(Ytilde - state.B + state.M2 / mu, hp.lambda3 / mu)


def constraint_gaps(state, Xtilde, Ytilde):
    """The five constraint-violation matrices, in checking order."""
    return (
        Xtilde - state.X - state.E_f,
        Ytilde - state.B - state.E_l,
        state.Z - state.J,
        state.B - state.K @ state.J,
        state.X - state.K,
    )


def residuals(state, Xtilde, Ytilde):
    """Frobenius norms of the five constraint violations."""
    return tuple(float(np.linalg.norm(g)) for g in constraint_gaps(state, Xtilde, Ytilde))


def update_multipliers_and_mu(state, Xtilde, Ytilde, hp):
    """Dual ascent on all five multipliers at the current mu, then grow mu by
    rho (saturating at mu_cap) and advance the iteration counter."""
    g1, g2, g3, g4, g5 = constraint_gaps(state, Xtilde, Ytilde)
    mu = state.mu
    # closed form rather than mu *= rho keeps mu_t == min(mu0*rho^t, cap) exact
    new_mu = mu_schedule(hp, state.iter + 1)
    return replace(
        state,
        M1=state.M1 + mu * g1,
        M2=state.M2 + mu * g2,
        M3=state.M3 + mu * g3,
        M4=state.M4 + mu * g4,
        M5=state.M5 + mu * g5,
        mu=new_mu,
        iter=state.iter + 1,
    )


def objective_value(X, Z, E_f, E_l, hp):
    """Recovery objective: ||X||_* + lambda1*||Z||_* + lambda2*R(E_f)
    + lambda3*||E_l||_{2,1}, with R given by the active feature regularizer."""
    if hp.feature_reg == FEATURE_REG_L1:
        feat = l1_norm(E_f)
    else:
        feat = float(np.sum(np.asarray(E_f) ** 2))
    return (
        nuclear_norm(X)
        + hp.lambda1 * nuclear_norm(Z)
        + hp.lambda2 * feat
        + hp.lambda3 * l21_norm(E_l)
    )


def augmented_lagrangian(state, Xtilde, Ytilde, hp):
    """Objective plus multiplier inner products plus the mu/2 quadratic
    penalties; the quantity each block update must not increase."""
    gaps = constraint_gaps(state, Xtilde, Ytilde)
    value = objective_value(state.X, state.Z, state.E_f, state.E_l, hp)
    for mult, gap in zip((state.M1, state.M2, state.M3, state.M4, state.M5), gaps):
        value += float(np.sum(mult * gap))
        value += 0.5 * state.mu * float(np.sum(gap * gap))
    return value


def mu_schedule(hp, t):
    """Penalty weight after t iterations: min(mu0 * rho^t, mu_cap)."""
    value = hp.mu0 * hp.rho**t
    if hp.mu_cap is not None:
        value = min(value, hp.mu_cap)
    return value


def _validate_inputs(Xtilde, Ytilde):
    Xtilde = np.asarray(Xtilde, dtype=float)
    Ytilde = np.asarray(Ytilde, dtype=float)
    if Xtilde.ndim != 2 or Ytilde.ndim != 2:
        raise ValidationError("feature and label inputs must be 2-d matrices")
    if Xtilde.shape[0] != Ytilde.shape[0]:
        raise ValidationError(
            f"row mismatch: features have {Xtilde.shape[0]} rows, labels {Ytilde.shape[0]}"
        )
    if not np.isfinite(Xtilde).all():
        raise ValidationError("feature matrix contains non-finite entries")
    if not np.isfinite(Ytilde).all():
        raise ValidationError("label matrix contains non-finite entries")
    onehot = np.isin(Ytilde, (0.0, 1.0)).all() and np.all(Ytilde.sum(axis=1) == 1.0)
    if not onehot:
        raise ValidationError("label matrix rows must be one-hot (a single 1, rest 0)")
    return Xtilde, Ytilde


def _scales(Xtilde, Ytilde, hp):
    if not hp.relative_residuals:
        return (1.0,) * 5
    sx = 1.0 + float(np.linalg.norm(Xtilde))
    sy = 1.0 + float(np.linalg.norm(Ytilde))
    return (sx, sy, max(sx, sy), sy, sx)


def fit(Xtilde, Ytilde, hp=None, *, pin_feature_error=False, pin_label_error=False):
    """Run the alternating updates until all five residuals fall below
    epsilon or iter_max iterations have been spent.

    ``pin_feature_error`` / ``pin_label_error`` freeze E_f / E_l at zero and
    skip their updates (the ablation modes of the experiment driver).

    Returns a FitResult; the trace includes the initial state, so it holds
    one more row than the number of iterations performed.
    """
    hp = hp or Hyperparams()
    Xtilde, Ytilde = _validate_inputs(Xtilde, Ytilde)
    n, d = Xtilde.shape
    c = Ytilde.shape[1]
    state = init_state(n, d, c, hp)
    scales = _scales(Xtilde, Ytilde, hp)

    trace = ConvergenceTrace()
    res = residuals(state, Xtilde, Ytilde)
    trace.append(0, res, objective_value(state.X, state.Z, state.E_f, state.E_l, hp), state.mu)

    termination = TERMINATION_ITER_MAX
    while state.iter < hp.iter_max:
        prev_K, prev_J = state.K, state.J
        prev_Ef, prev_El = state.E_f, state.E_l
        try:
            state.X = update_X(state, Xtilde)
            state.Z = update_Z(state, hp)
            state.B = update_B(state, Ytilde)
            state.J = update_J(state)
            state.K = update_K(state)
            if not pin_feature_error:
                state.E_f = update_Ef(state, Xtilde, hp)
            if not pin_label_error:
                state.E_l = update_El(state, Ytilde, hp)
        except ValidationError as exc:
            # block operands only go non-finite when the iteration blew up
            raise DivergenceError(str(exc), iteration=state.iter + 1) from exc

        for name in ("X", "Z", "B", "J", "K", "E_f", "E_l"):
            if not np.isfinite(getattr(state, name)).all():
                raise DivergenceError(
                    f"block {name} became non-finite", iteration=state.iter + 1
                )

        mu_used = state.mu
        shifts = (
            mu_used * float(np.linalg.norm(state.K - prev_K)),
            mu_used * float(np.linalg.norm(state.J - prev_J)),
            mu_used * float(np.linalg.norm(state.E_f - prev_Ef)),
            mu_used * float(np.linalg.norm(state.E_l - prev_El)),
        )
        state = update_multipliers_and_mu(state, Xtilde, Ytilde, hp)
        res = residuals(state, Xtilde, Ytilde)
        trace.append(
            state.iter,
            res,
            objective_value(state.X, state.Z, state.E_f, state.E_l, hp),
            state.mu,
            shifts,
        )
        if all(r / s <= hp.epsilon for r, s in zip(res, scales)):
            termination = TERMINATION_CONVERGED
            break

    return FitResult(
        X_star=state.X,
        Z_star=state.Z,
        E_f_star=state.E_f,
        E_l_star=state.E_l,
        trace=trace,
        termination=termination,
        state=state,
    )
