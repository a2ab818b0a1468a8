"""Fixed-step RK4 integration of the joint estimator + filter state.

The estimator ODEs are smooth and short-horizon, so a classical fixed-step
fourth-order Runge-Kutta scheme is used everywhere: runs are deterministic,
the order is testable, and no step-size heuristics enter the results.
Signals are evaluated at the RK4 stage times (t, t+dt/2, t+dt), not held
constant over a step; ``simulate`` pre-samples them on the half-step grid
once per run and then advances with the same Butcher tableau as ``rk4_step``.

Divergence is detected at recording points: any non-finite state entry or a
state norm above 1e12 aborts the run with the offending time and component.
The requested end time is rounded to the nearest whole number of steps.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DivergenceError
from .estimators import adjugate, det, manifold_residual, mge_gain, storage
from .types import EstimationProblem, EstimatorConfig, Trajectory, Variant

_STATE_NORM_LIMIT = 1e12


@dataclass(frozen=True)
class SimSettings:
    """Step size, horizon, and trajectory subsampling factor."""

    t_end: float
    dt: float = 1e-3
    record_every: int = 10

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0 and self.dt <= self.t_end):
            raise ConfigurationError(
                f"need 0 < dt <= t_end, got dt={self.dt}, t_end={self.t_end}"
            )
        if self.record_every < 1:
            raise ConfigurationError("record_every must be >= 1")


def rk4_step(rhs, t: float, state: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of ``d state/dt = rhs(t, state)``."""
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    state = np.asarray(state, dtype=float)
    half = 0.5 * dt
    k1 = _checked_stage(rhs(t, state), t)
    k2 = _checked_stage(rhs(t + half, state + half * k1), t + half)
    k3 = _checked_stage(rhs(t + half, state + half * k2), t + half)
    k4 = _checked_stage(rhs(t + dt, state + dt * k3), t + dt)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _checked_stage(value, t: float) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        bad = int(np.nonzero(~np.isfinite(np.atleast_1d(value)))[0][0])
        raise DivergenceError(f"non-finite stage value at t={t} (component {bad})")
    return value


def _stage_rhs(variant: Variant, q: int, tau: float, mu: float):
    """Derivative of the flat joint state for precomputed (w, g) samples.

    Flat layout for the filtered variants: [theta_hat, Omega.ravel(), G].
    """
    if variant is Variant.GE:
        def f(y, w, g):
            return (tau * (g - w @ y)) * w
        return f

    if variant is Variant.MGE:
        def f(y, w, g):
            return mge_gain(w, tau, mu) * (g - w @ y)
        return f

    q2 = q * q

    def split(y):
        return y[:q], y[q:q + q2].reshape(q, q), y[q + q2:]

    if variant is Variant.MRE:
        def dtheta(th, om, ge):
            return tau * (ge - om @ th)
    elif variant is Variant.MGE_MRE:
        if q < 2:
            raise ConfigurationError("modified filtered update needs dimension >= 2")

        def dtheta(th, om, ge):
            eps = ge - om @ th
            d = tau * eps
            d[-1] = 2.0 * tau * eps[-1] + tau * float(np.sum(eps[1:-1])) \
                - (q - 1) * mu * tau * eps[0]
            return d
    elif variant is Variant.DREM:
        def dtheta(th, om, ge):
            delta = det(om)
            return tau * delta * (adjugate(om) @ ge - delta * th)
    else:
        raise ConfigurationError(f"unknown estimator variant {variant}")

    def f(y, w, g):
        th, om, ge = split(y)
        d_om = np.outer(w, w) - om
        d_g = w * g - ge
        return np.concatenate([dtheta(th, om, ge), d_om.ravel(), d_g])

    return f


def simulate(problem: EstimationProblem, config: EstimatorConfig,
             settings: SimSettings) -> Trajectory:
    """Integrate one estimator against one problem and record its trajectory.

    Rows are recorded every ``record_every`` steps, always including t = 0
    and the final step. Deterministic: identical inputs give identical
    trajectories.
    """
    q = problem.dimension
    state0 = config.initial_state(q)
    variant = config.variant

    n_steps = int(round(settings.t_end / settings.dt))
    n_steps = max(n_steps, 1)
    dt = settings.dt

    # signals on the half-step grid: index 2k is t_k, 2k+1 is t_k + dt/2
    t_half = 0.5 * dt * np.arange(2 * n_steps + 1)
    w_grid = problem.regressor.sample(t_half)
    g_grid = w_grid @ problem.true_params

    if variant.uses_filter:
        y = np.concatenate([state0.theta_hat,
                            state0.filter.omega_ext.ravel(),
                            state0.filter.g_ext])
    else:
        y = state0.theta_hat.copy()

    record_ks = list(range(0, n_steps + 1, settings.record_every))
    if record_ks[-1] != n_steps:
        record_ks.append(n_steps)
    n_rec = len(record_ks)

    times = np.empty(n_rec)
    estimates = np.empty((n_rec, q))
    err_norms = np.empty(n_rec)
    residuals = np.empty(n_rec)
    storages = np.empty(n_rec)

    theta = problem.true_params
    mu = config.mu

    def record(slot: int, k: int, yk: np.ndarray):
        t = k * dt
        with np.errstate(over="ignore", invalid="ignore"):
            bounded = np.all(np.isfinite(yk)) and float(yk @ yk) <= _STATE_NORM_LIMIT ** 2
        if not bounded:
            nonfin = np.nonzero(~np.isfinite(yk))[0]
            comp = int(nonfin[0]) if nonfin.size else int(np.argmax(np.abs(yk)))
            raise DivergenceError(
                f"state diverged by t={t} (component {comp}, "
                f"variant {variant.value}, dt={dt})"
            )
        th = yk[:q]
        times[slot] = t
        estimates[slot] = th
        terr = theta - th
        err_norms[slot] = np.sqrt(terr @ terr)
        if q >= 2:
            residuals[slot] = manifold_residual(terr, mu)
            storages[slot] = storage(residuals[slot])
        else:
            residuals[slot] = np.nan
            storages[slot] = np.nan

    f = _stage_rhs(variant, q, config.tau, mu)
    sixth = dt / 6.0
    half = 0.5 * dt

    slot = 0
    record(slot, 0, y)
    slot += 1
    next_rec = record_ks[slot]

    for k in range(n_steps):
        i = 2 * k
        w0 = w_grid[i]
        wm = w_grid[i + 1]
        w1 = w_grid[i + 2]
        g0 = g_grid[i]
        gm = g_grid[i + 1]
        g1 = g_grid[i + 2]
        k1 = f(y, w0, g0)
        k2 = f(y + half * k1, wm, gm)
        k3 = f(y + half * k2, wm, gm)
        k4 = f(y + dt * k3, w1, g1)
        y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if k + 1 == next_rec:
            record(slot, k + 1, y)
            slot += 1
            next_rec = record_ks[slot] if slot < n_rec else -1

    return Trajectory(times=times, estimates=estimates, err_norms=err_norms,
                      manifold_residuals=residuals, storage_values=storages)


def convergence_time(traj: Trajectory, tol: float) -> float | None:
    """Earliest recorded time after which the error norm stays within tol.

    None when the final recorded error still exceeds tol.
    """
    if tol <= 0:
        raise ConfigurationError("tolerance must be positive")
    above = np.nonzero(traj.err_norms > tol)[0]
    if above.size == 0:
        return float(traj.times[0])
    last_bad = int(above[-1])
    if last_bad == len(traj) - 1:
        return None
    return float(traj.times[last_bad + 1])
