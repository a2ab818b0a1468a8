"""Right-hand sides of the estimator ODEs.

All updates share the structure "gain times scalar prediction error". The
plain gradient estimator uses the gain tau*w on the instantaneous error
g - w^T theta_hat. The modified gradient estimator keeps the first q-1 rows
and replaces the last-row gain with

    k_q = 2 tau w_q + tau (w_2 + ... + w_{q-1}) - (q-1) mu tau w_1,

which drives the parameter error onto the linear manifold
theta_err_2 + ... + theta_err_q = (q-1) mu theta_err_1 while descending the
prediction error. The filtered variants (MRE family) apply the same two gain
patterns to the per-row residuals of the extended system G - Omega theta_hat,
and the DREM baseline mixes the extended system through its determinant so
each coordinate error evolves independently. The DREM equations follow the
standard determinant-mixing construction from the adaptive-estimation
literature (determinant and adjugate of the extended regressor matrix).

Every function here is pure: state in, derivative out.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, UnsupportedDimensionError
from .signals import RegressorSpec
from .types import EstimatorState


def ge_rhs(state: EstimatorState, omega: np.ndarray, g: float, tau: float) -> np.ndarray:
    """Gradient update: d theta_hat/dt = tau * w * (g - w^T theta_hat)."""
    omega = np.asarray(omega, dtype=float)
    err = g - omega @ state.theta_hat
    return tau * omega * err


def mge_gain(omega: np.ndarray, tau: float, mu: float) -> np.ndarray:
    """Instantaneous gain vector of the modified gradient estimator.

    Rows 1..q-1 keep the gradient gain tau*w_i; the last row carries the
    manifold-coupled gain. For q = 1 no last-row modification is definable
    and the gradient gain is returned unchanged.
    """
    omega = np.asarray(omega, dtype=float)
    q = omega.shape[0]
    if q == 0:
        raise ConfigurationError("regressor dimension must be at least 1")
    k = tau * omega
    if q >= 2:
        k = k.copy()
        k[-1] = 2.0 * tau * omega[-1] + tau * float(np.sum(omega[1:-1])) \
            - (q - 1) * mu * tau * omega[0]
    return k


def mge_rhs(state: EstimatorState, omega: np.ndarray, g: float,
            tau: float, mu: float) -> np.ndarray:
    """Modified gradient update: mge_gain(w) * (g - w^T theta_hat)."""
    omega = np.asarray(omega, dtype=float)
    err = g - omega @ state.theta_hat
    return mge_gain(omega, tau, mu) * err


def _require_filter(state: EstimatorState):
    if state.filter is None:
        raise ConfigurationError("estimator variant needs a filter state")
    return state.filter


def mre_rhs(state: EstimatorState, tau: float) -> np.ndarray:
    """Filtered-system gradient update: tau * (G - Omega theta_hat)."""
    filt = _require_filter(state)
    return tau * (filt.g_ext - filt.omega_ext @ state.theta_hat)


def mge_mre_rhs(state: EstimatorState, tau: float, mu: float) -> np.ndarray:
    """Modified last-row gain applied to the filtered residuals.

    With eps = G - Omega theta_hat: rows 1..q-1 get tau*eps_i, the last row
    gets 2 tau eps_q + tau (eps_2 + ... + eps_{q-1}) - (q-1) mu tau eps_1.
    """
    filt = _require_filter(state)
    q = state.theta_hat.shape[0]
    if q < 2:
        raise ConfigurationError("modified filtered update needs dimension >= 2")
    eps = filt.g_ext - filt.omega_ext @ state.theta_hat
    d = tau * eps
    d[-1] = 2.0 * tau * eps[-1] + tau * float(np.sum(eps[1:-1])) \
        - (q - 1) * mu * tau * eps[0]
    return d


def drem_rhs(state: EstimatorState, tau: float) -> np.ndarray:
    """Determinant-mixed update on the extended system.

    Delta = det(Omega), Y = adj(Omega) G; each coordinate evolves as
    tau * Delta * (Y_i - Delta * theta_hat_i). Delta = 0 stalls the update
    (zero derivative) by construction; that is expected startup behavior,
    not an error.
    """
    filt = _require_filter(state)
    delta = det(filt.omega_ext)
    y = adjugate(filt.omega_ext) @ filt.g_ext
    return tau * delta * (y - delta * state.theta_hat)


def manifold_residual(theta_err: np.ndarray, mu: float) -> float:
    """Signed distance-like residual of the combined linear manifold:
    sum of theta_err_2..theta_err_q minus (q-1)*mu*theta_err_1."""
    theta_err = np.asarray(theta_err, dtype=float)
    q = theta_err.shape[0]
    if q < 2:
        raise ConfigurationError("manifold residual needs dimension >= 2")
    return float(np.sum(theta_err[1:]) - (q - 1) * mu * theta_err[0])


def storage(residual: float) -> float:
    """Quadratic storage value of the manifold residual: residual**2 / 2."""
    return 0.5 * residual * residual


def ge_closed_form_scalar(omega: RegressorSpec, tau: float, theta_err_0: float,
                          t: float, dt: float = 1e-3) -> float:
    """Exact scalar-gradient error: theta_err_0 * exp(-tau * int_0^t w(s)^2 ds).

    Only valid for one-dimensional regressors; the matrix-exponential analog
    is not the solution when w(t) w(t)^T fails to commute across time, so
    larger dimensions are rejected outright. The integral uses composite
    trapezoid with the given step.
    """
    if omega.dimension != 1:
        raise UnsupportedDimensionError(
            f"closed-form error solution is scalar-only, got dimension {omega.dimension}"
        )
    if t < 0:
        raise ConfigurationError("time must be nonnegative")
    if t == 0:
        return float(theta_err_0)
    n = max(1, int(round(t / dt)))
    h = t / n
    ts = h * np.arange(n + 1)
    w2 = omega.sample(ts)[:, 0] ** 2
    integral = h * (np.sum(w2) - 0.5 * (w2[0] + w2[-1]))
    return float(theta_err_0 * np.exp(-tau * integral))


# --------------------------------------------------------------------------
# Small dense determinant / adjugate helpers (closed form for q <= 3, cofactor
# expansion above; the extended regressor matrices here are tiny)
# --------------------------------------------------------------------------

def det(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    q = m.shape[0]
    if q == 1:
        return float(m[0, 0])
    if q == 2:
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    if q == 3:
        return float(
            m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
            - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
            + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
        )
    return float(np.linalg.det(m))


def adjugate(m: np.ndarray) -> np.ndarray:
    """Transpose of the cofactor matrix; adj(m) @ m = det(m) * I."""
    m = np.asarray(m, dtype=float)
    q = m.shape[0]
    if q == 1:
        return np.ones((1, 1))
    if q == 2:
        return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
    if q == 3:
        a, b, c = m[0]
        d, e, f = m[1]
        g, h, i = m[2]
        return np.array([
            [e * i - f * h, c * h - b * i, b * f - c * e],
            [f * g - d * i, a * i - c * g, c * d - a * f],
            [d * h - e * g, b * g - a * h, a * e - b * d],
        ])
    cof = np.empty_like(m)
    for i in range(q):
        rows = [k for k in range(q) if k != i]
        for j in range(q):
            cols = [k for k in range(q) if k != j]
            cof[i, j] = (-1) ** (i + j) * np.linalg.det(m[np.ix_(rows, cols)])
    return cof.T
