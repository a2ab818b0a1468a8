"""Scenario runner: batch simulation, diagnostics, CSV export, config files.

A scenario bundles one estimation problem with one or more estimator
configurations and shared integration settings. Running it produces, per
estimator, the recorded trajectory, convergence times at the standard
tolerances, and the count of storage increases (the manifold-attractivity
diagnostic the modified-gain variants are expected to keep near zero), plus
a sliding-window excitation summary of the shared regressor.

Scenario files are JSON with the field names of ScenarioConfig; see
configs/ in the repository for annotated examples. ``problem`` is either a
builtin scenario name or an inline object with regressor expression strings
and true parameters.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import catalog
from .errors import ConfigurationError
from .sim import SimSettings, convergence_time, simulate
from .signals import excitation_sweep, regressor_from_strings
from .types import EstimationProblem, EstimatorConfig, Trajectory

CONVERGENCE_TOLERANCES = (0.1, 0.01)
STORAGE_BAND = 1e-10
_PE_WINDOW = 2.0 * math.pi
_PE_STRIDE = 1.0


@dataclass
class OutputPaths:
    """Optional explicit output locations; csv is a per-estimator prefix."""

    csv: str | None = None
    svg: str | None = None


@dataclass
class ScenarioConfig:
    name: str
    problem: EstimationProblem
    estimators: list[EstimatorConfig]
    settings: SimSettings
    outputs: OutputPaths = field(default_factory=OutputPaths)

    def __post_init__(self):
        if not self.estimators:
            raise ConfigurationError(f"scenario {self.name!r} configures no estimators")
        labels = [e.resolved_label for e in self.estimators]
        if len(set(labels)) != len(labels):
            raise ConfigurationError(
                f"estimator labels must be unique within scenario {self.name!r}: {labels}"
            )


@dataclass
class EstimatorRun:
    label: str
    config: EstimatorConfig
    trajectory: Trajectory
    convergence_times: dict[float, float | None]
    storage_violations: int | None
    mu_flagged: bool


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    runs: list[EstimatorRun]
    excitation: list[tuple[float, float]]


def count_storage_violations(traj: Trajectory, band: float = STORAGE_BAND) -> int:
    """Recorded steps on which the storage value grew by more than band."""
    return int(np.sum(np.diff(traj.storage_values) > band))


def run_scenario(config: ScenarioConfig) -> ScenarioResult:
    """Simulate every configured estimator against the shared problem.

    Result blocks keep the configuration order; errors are re-raised with the
    offending estimator label attached.
    """
    runs = []
    for est in config.estimators:
        try:
            traj = simulate(config.problem, est, config.settings)
        except Exception as exc:
            exc.args = (f"[{config.name}/{est.resolved_label}] {exc}",) + exc.args[1:]
            raise
        cts = {tol: convergence_time(traj, tol) for tol in CONVERGENCE_TOLERANCES}
        violations = count_storage_violations(traj) if est.variant.uses_manifold_gain else None
        runs.append(EstimatorRun(
            label=est.resolved_label, config=est, trajectory=traj,
            convergence_times=cts, storage_violations=violations,
            mu_flagged=est.mu_flag(),
        ))

    window = min(_PE_WINDOW, config.settings.t_end)
    last_start = max(config.settings.t_end - window, 0.0)
    starts = np.arange(0.0, last_start + 1e-9, _PE_STRIDE)
    dt = min(config.settings.dt, window / 10.0)
    excitation = excitation_sweep(config.problem.regressor, starts, window, dt)

    return ScenarioResult(config=config, runs=runs, excitation=excitation)


# --------------------------------------------------------------------------
# CSV export
# --------------------------------------------------------------------------

def format_float(x: float) -> str:
    """Shortest representation that round-trips through float()."""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def csv_path_for(base: str, label: str) -> str:
    return f"{base}_{label}.csv"


def export_csv(result: ScenarioResult, base: str) -> list[str]:
    """Write one CSV per estimator next to the base path (suffix _<label>.csv).

    Columns: t, theta_hat_1..theta_hat_q, err_norm, manifold_residual,
    storage. Values use shortest round-trip formatting and newline-terminated
    rows, so repeated exports of the same result are byte-identical.
    """
    parent = os.path.dirname(base)
    if parent:
        os.makedirs(parent, exist_ok=True)
    paths = []
    for run in result.runs:
        path = csv_path_for(base, run.label)
        try:
            _write_trajectory_csv(run.trajectory, path)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        paths.append(path)
    return paths


def _csv_header(q: int) -> str:
    cols = ["t"] + [f"theta_hat_{i + 1}" for i in range(q)]
    cols += ["err_norm", "manifold_residual", "storage"]
    return ",".join(cols)


def _write_trajectory_csv(traj: Trajectory, path: str):
    q = traj.dimension
    lines = [_csv_header(q)]
    for i in range(len(traj)):
        cells = [format_float(traj.times[i])]
        cells += [format_float(v) for v in traj.estimates[i]]
        cells += [format_float(traj.err_norms[i]),
                  format_float(traj.manifold_residuals[i]),
                  format_float(traj.storage_values[i])]
        lines.append(",".join(cells))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory_csv(path: str) -> Trajectory:
    """Parse a file written by export_csv back into a Trajectory."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    q = len(header) - 4
    if q < 1 or header != _csv_header(q).split(","):
        raise ConfigurationError(f"{path} does not have the trajectory CSV schema")
    data = np.array([[float(c) for c in row] for row in rows]) if rows else \
        np.empty((0, len(header)))
    return Trajectory(
        times=data[:, 0],
        estimates=data[:, 1:1 + q],
        err_norms=data[:, 1 + q],
        manifold_residuals=data[:, 2 + q],
        storage_values=data[:, 3 + q],
    )


# --------------------------------------------------------------------------
# Scenario construction: builtins and JSON files
# --------------------------------------------------------------------------

def scenario_from_name(name: str, dt: float | None = None,
                       t_end: float | None = None) -> ScenarioConfig:
    """Default scenario for a builtin problem (catalog estimators/settings)."""
    problem = catalog.builtin_problem(name)
    settings = SimSettings(
        t_end=t_end if t_end is not None else catalog.builtin_t_end(name),
        dt=dt if dt is not None else 1e-3,
    )
    return ScenarioConfig(name=name, problem=problem,
                          estimators=catalog.builtin_estimators(name),
                          settings=settings)


def _problem_from_json(node) -> EstimationProblem:
    if isinstance(node, str):
        return catalog.builtin_problem(node)
    if not isinstance(node, dict):
        raise ConfigurationError("problem must be a builtin name or an object")
    try:
        spec = regressor_from_strings(node["regressor"])
        theta = np.asarray(node["true_params"], dtype=float)
    except KeyError as exc:
        raise ConfigurationError(f"problem object missing field {exc}") from None
    return EstimationProblem(regressor=spec, true_params=theta)


def _estimator_from_json(node) -> EstimatorConfig:
    if not isinstance(node, dict) or "variant" not in node:
        raise ConfigurationError("each estimator entry needs at least a variant")
    known = {"variant", "tau", "mu", "theta_hat_0", "filter_init", "label"}
    unknown = set(node) - known
    if unknown:
        raise ConfigurationError(f"unknown estimator fields: {sorted(unknown)}")
    theta0 = node.get("theta_hat_0")
    return EstimatorConfig(
        variant=node["variant"],
        tau=float(node.get("tau", 1.0)),
        mu=float(node.get("mu", 0.0)),
        theta_hat_0=None if theta0 is None else np.asarray(theta0, dtype=float),
        filter_init=float(node.get("filter_init", 0.0)),
        label=node.get("label"),
    )


def load_scenario(path: str, dt: float | None = None,
                  t_end: float | None = None) -> ScenarioConfig:
    """Load a scenario config file (JSON), with optional dt/t_end overrides."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"invalid JSON in {path}: {exc}") from exc

    if not isinstance(doc, dict):
        raise ConfigurationError(f"{path}: top level must be an object")
    name = doc.get("name") or os.path.splitext(os.path.basename(path))[0]
    problem = _problem_from_json(doc.get("problem", {}))

    est_nodes = doc.get("estimators")
    if est_nodes is None and isinstance(doc.get("problem"), str):
        estimators = catalog.builtin_estimators(doc["problem"])
    else:
        estimators = [_estimator_from_json(n) for n in (est_nodes or [])]

    st = doc.get("settings", {})
    default_t_end = None
    if isinstance(doc.get("problem"), str):
        default_t_end = catalog.builtin_t_end(doc["problem"])
    resolved_t_end = t_end if t_end is not None else st.get("t_end", default_t_end)
    if resolved_t_end is None:
        raise ConfigurationError(f"{path}: settings.t_end is required for inline problems")
    settings = SimSettings(
        t_end=float(resolved_t_end),
        dt=float(dt if dt is not None else st.get("dt", 1e-3)),
        record_every=int(st.get("record_every", 10)),
    )

    out = doc.get("outputs", {}) or {}
    outputs = OutputPaths(csv=out.get("csv"), svg=out.get("svg"))
    return ScenarioConfig(name=name, problem=problem, estimators=estimators,
                          settings=settings, outputs=outputs)
