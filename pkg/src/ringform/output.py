"""Serialization of runs: trajectory/metric CSVs and the JSON report.

The trajectory CSV is the canonical artifact: floats are written with 17
significant digits so parsing recovers them bit for bit, and both the
metric series and the report are pure functions of the rows actually
written (plus the run configuration). Regenerating the report from a
parsed CSV therefore reproduces it field for field. The target velocity
is not stored, so consumers recover it by finite-differencing the target
positions; the report uses that estimate throughout.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .controller import ControllerParams
from .formation import FormationSpec
from .geometry import TWO_PI
from .simulate import Trajectory
from .stability import PolarState, classify_equilibrium


@dataclass(frozen=True)
class TrajectoryTable:
    """In-memory image of trajectory.csv."""

    times: np.ndarray       # (S,)
    agent_pos: np.ndarray   # (S, N, 2)
    agent_vel: np.ndarray   # (S, N, 2)
    rho: np.ndarray         # (S, N)
    alpha: np.ndarray       # (S, N)
    target_pos: np.ndarray  # (S, 2)

    @property
    def n_agents(self) -> int:
        return self.agent_pos.shape[1]


def table_from_trajectory(traj: Trajectory, store_every: int = 1) -> TrajectoryTable:
    """Thin a trajectory to the rows that will be serialized.

    Keeps every ``store_every``-th step and always the final one, so end
    metrics survive thinning even when the step count is not a multiple.
    """
    s = len(traj.times)
    idx = np.arange(0, s, store_every)
    if idx[-1] != s - 1:
        idx = np.append(idx, s - 1)
    return TrajectoryTable(
        times=traj.times[idx],
        agent_pos=traj.positions[idx],
        agent_vel=traj.velocities[idx],
        rho=traj.rho[idx],
        alpha=traj.angle[idx],
        target_pos=traj.target_positions[idx],
    )


def trajectory_header(n: int) -> list[str]:
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"x{i}", f"y{i}", f"vx{i}", f"vy{i}", f"rho{i}", f"alpha{i}"]
    cols += ["x0", "y0"]
    return cols


def _g17(v: float) -> str:
    return format(v, ".17g")


def write_trajectory_csv(path: Path, table: TrajectoryTable) -> None:
    n = table.n_agents
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(trajectory_header(n))
        for k in range(len(table.times)):
            row = [_g17(table.times[k])]
            for i in range(n):
                row += [
                    _g17(table.agent_pos[k, i, 0]),
                    _g17(table.agent_pos[k, i, 1]),
                    _g17(table.agent_vel[k, i, 0]),
                    _g17(table.agent_vel[k, i, 1]),
                    _g17(table.rho[k, i]),
                    _g17(table.alpha[k, i]),
                ]
            row += [_g17(table.target_pos[k, 0]), _g17(table.target_pos[k, 1])]
            writer.writerow(row)


def read_trajectory_csv(path: Path) -> TrajectoryTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    n = (len(header) - 3) // 6
    if len(header) != 1 + 6 * n + 2:
        raise ValueError(f"unexpected trajectory column count {len(header)}")
    agents = data[:, 1 : 1 + 6 * n].reshape(len(data), n, 6)
    return TrajectoryTable(
        times=data[:, 0],
        agent_pos=agents[:, :, 0:2].copy(),
        agent_vel=agents[:, :, 2:4].copy(),
        rho=agents[:, :, 4].copy(),
        alpha=agents[:, :, 5].copy(),
        target_pos=data[:, 1 + 6 * n :].copy(),
    )


def estimate_target_velocity(table: TrajectoryTable) -> np.ndarray:
    """Finite-difference target velocity from logged target positions.

    Central differences inside, one-sided at the ends; spacing-aware so
    an irregular final interval from thinning is handled.
    """
    t = table.times
    p = table.target_pos
    v = np.empty_like(p)
    if len(t) < 2:
        v[:] = 0.0
        return v
    v[0] = (p[1] - p[0]) / (t[1] - t[0])
    v[-1] = (p[-1] - p[-2]) / (t[-1] - t[-2])
    if len(t) > 2:
        dt2 = (t[2:] - t[:-2])[:, None]
        v[1:-1] = (p[2:] - p[:-2]) / dt2
    return v


@dataclass(frozen=True)
class MetricTable:
    """In-memory image of metrics.csv; derived from a TrajectoryTable."""

    times: np.ndarray
    radius_error: np.ndarray           # (S, N)
    angle_rate_error: np.ndarray       # (S, N)
    spacing_error: np.ndarray          # (S, N)
    min_pairwise_distance: np.ndarray  # (S,)


def metrics_from_table(
    table: TrajectoryTable, spec: FormationSpec, params: ControllerParams
) -> MetricTable:
    v0 = estimate_target_velocity(table)
    bx = table.agent_pos[:, :, 0] - table.target_pos[:, None, 0]
    by = table.agent_pos[:, :, 1] - table.target_pos[:, None, 1]
    bvx = table.agent_vel[:, :, 0] - v0[:, None, 0]
    bvy = table.agent_vel[:, :, 1] - v0[:, None, 1]
    rho_c = np.maximum(table.rho, params.eps_rho)
    rate = (bx * bvy - by * bvx) / rho_c**2

    spacing = np.mod(np.roll(table.alpha, -1, axis=1) - table.alpha, TWO_PI)
    delta = np.abs(spacing - spec.spacings_array())
    spacing_error = np.minimum(delta, TWO_PI - delta)

    n = table.n_agents
    if n > 1:
        diff = table.agent_pos[:, :, None, :] - table.agent_pos[:, None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        iu = np.triu_indices(n, k=1)
        min_dist = dist[:, iu[0], iu[1]].min(axis=1)
    else:
        min_dist = np.full(len(table.times), np.inf)

    return MetricTable(
        times=table.times,
        radius_error=table.rho - spec.radii_array(),
        angle_rate_error=rate - spec.omega,
        spacing_error=spacing_error,
        min_pairwise_distance=min_dist,
    )


def write_metrics_csv(path: Path, m: MetricTable) -> None:
    n = m.radius_error.shape[1]
    header = (
        ["t"]
        + [f"radius_error{i}" for i in range(1, n + 1)]
        + [f"angle_rate_error{i}" for i in range(1, n + 1)]
        + [f"spacing_error{i}" for i in range(1, n + 1)]
        + ["min_pairwise_distance"]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(len(m.times)):
            row = (
                [_g17(m.times[k])]
                + [_g17(v) for v in m.radius_error[k]]
                + [_g17(v) for v in m.angle_rate_error[k]]
                + [_g17(v) for v in m.spacing_error[k]]
                + [_g17(m.min_pairwise_distance[k])]
            )
            writer.writerow(row)


def _settle_time(times: np.ndarray, worst: np.ndarray, threshold: float):
    """First logged time after which ``worst`` stays below ``threshold``."""
    above = worst >= threshold
    if above[-1]:
        return None
    if not above.any():
        return float(times[0])
    last_bad = int(np.nonzero(above)[0][-1])
    if last_bad + 1 >= len(times):
        return None
    return float(times[last_bad + 1])


def build_report(
    table: TrajectoryTable,
    spec: FormationSpec,
    params: ControllerParams,
    threshold: float = 1e-2,
) -> dict:
    """Summarize a run from its serialized rows.

    Every field is computable from the trajectory CSV plus the run
    configuration, so the report can be regenerated from disk.
    """
    m = metrics_from_table(table, spec, params)
    worst_radius = np.abs(m.radius_error).max(axis=1)
    worst_rate = np.abs(m.angle_rate_error).max(axis=1)
    worst_spacing = m.spacing_error.max(axis=1)

    v0 = estimate_target_velocity(table)
    final_states = []
    for i in range(table.n_agents):
        vbar = table.agent_vel[-1, i] - v0[-1]
        heading = math.atan2(vbar[1], vbar[0]) if np.hypot(*vbar) > 0.0 else 0.0
        final_states.append(
            PolarState(
                rho=float(table.rho[-1, i]),
                speed=float(np.hypot(*vbar)),
                beta=float(np.mod(heading - table.alpha[-1, i], TWO_PI)),
                angle=float(table.alpha[-1, i]),
            )
        )
    label = classify_equilibrium(final_states, spec, params, tol=threshold)

    return {
        "n_agents": table.n_agents,
        "omega": spec.omega,
        "threshold": threshold,
        "t_end": float(table.times[-1]),
        "rows": len(table.times),
        "final_radius_errors": [float(v) for v in m.radius_error[-1]],
        "final_radius_error_max": float(worst_radius[-1]),
        "final_angle_rate_errors": [float(v) for v in m.angle_rate_error[-1]],
        "final_angle_rate_error_max": float(worst_rate[-1]),
        "final_spacing_errors": [float(v) for v in m.spacing_error[-1]],
        "final_spacing_error_max": float(worst_spacing[-1]),
        "min_pairwise_distance": float(m.min_pairwise_distance.min()),
        "settle_time_radius": _settle_time(m.times, worst_radius, threshold),
        "settle_time_angle_rate": _settle_time(m.times, worst_rate, threshold),
        "settle_time_spacing": _settle_time(m.times, worst_spacing, threshold),
        "equilibrium_case": label.case,
        "equilibrium_residual": label.residual,
    }


def write_report(path: Path, report: dict) -> None:
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_report(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))
