"""Closed-loop simulation of the N-agent system around a target.

Agents are double integrators driven by the distributed controller; the
target follows one of the closed-form models. Integration is classical
fixed-step RK4 with the target sampled analytically at stage times, so
the feedforward acceleration never lags the actual target motion. Runs
are deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import controller as ctrl
from ._backend import get_kernel
from .formation import FormationSpec, assign_labels, validate
from .geometry import TWO_PI, Vec2
from .targets import TargetModel, TargetState


class SimulationDiverged(RuntimeError):
    """A state stopped being finite mid-run."""

    def __init__(self, step: int, agent: int, t: float):
        self.step = step
        self.agent = agent
        self.t = t
        super().__init__(
            f"non-finite state at step {step} (t = {t:.6g}) for agent {agent}"
        )


class InvalidConfig(ValueError):
    """A simulation configuration failed validation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class AgentState:
    p: Vec2
    v: Vec2


@dataclass(frozen=True)
class RandomAnnulusInit:
    """Seeded random start: positions area-uniform on an annulus around the
    target's initial position, velocities uniform in a disk."""

    r_min: float = 0.5
    r_max: float = 2.5
    v_max: float = 0.5


@dataclass(frozen=True)
class ExplicitInit:
    states: tuple[AgentState, ...]


@dataclass(frozen=True)
class SimConfig:
    spec: FormationSpec
    params: ctrl.ControllerParams = field(default_factory=ctrl.ControllerParams)
    target: TargetModel = field(default_factory=TargetModel)
    dt: float = 1e-3
    t_end: float = 60.0
    seed: int = 0
    init: RandomAnnulusInit | ExplicitInit = field(default_factory=RandomAnnulusInit)


def validate_config(config: SimConfig) -> list[str]:
    violations = validate(config.spec)
    if not (config.dt > 0.0):
        violations.append(f"dt = {config.dt} must be positive")
    if config.t_end < config.dt:
        violations.append(f"t_end = {config.t_end} must be at least dt = {config.dt}")
    if config.spec.radii and not violations:
        cap = min(config.spec.radii) / 100.0
        if config.params.eps_rho > cap:
            violations.append(
                f"eps_rho = {config.params.eps_rho} exceeds min radius / 100 = {cap}"
            )
    if isinstance(config.init, RandomAnnulusInit):
        if not (config.init.r_min > 0.0):
            violations.append(f"r_min = {config.init.r_min} must be positive")
        if config.init.r_max < config.init.r_min:
            violations.append("r_max must be at least r_min")
        if config.init.v_max < 0.0:
            violations.append("v_max must be non-negative")
    elif len(config.init.states) != config.spec.n:
        violations.append(
            f"explicit init has {len(config.init.states)} states for {config.spec.n} agents"
        )
    return violations


@dataclass(frozen=True)
class Trajectory:
    """Full state log of one run plus controller-derived series.

    Arrays are indexed ``[step, agent]``; ``times`` increases by the
    config's dt. Derived series are recomputed from the logged states, so
    they are identical for any backend that produced the same states.
    """

    config: SimConfig
    times: np.ndarray            # (S,)
    positions: np.ndarray        # (S, N, 2)
    velocities: np.ndarray       # (S, N, 2)
    target_positions: np.ndarray # (S, 2)
    target_velocities: np.ndarray
    target_accelerations: np.ndarray
    rho: np.ndarray              # (S, N) distance to target
    angle: np.ndarray            # (S, N) polar angle about target, [0, 2*pi)
    angle_rate: np.ndarray       # (S, N)
    spacing: np.ndarray          # (S, N) gap to next neighbor, [0, 2*pi)
    spacing_rate: np.ndarray     # (S, N)
    rotation_gain: np.ndarray    # (S, N) tangential gain including layout term
    control: np.ndarray          # (S, N, 2)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[1]

    def final_states(self) -> list[AgentState]:
        return [
            AgentState(Vec2(*self.positions[-1, i]), Vec2(*self.velocities[-1, i]))
            for i in range(self.n_agents)
        ]


@dataclass(frozen=True)
class MetricSeries:
    """Formation-error series derived from a trajectory."""

    times: np.ndarray
    radius_error: np.ndarray          # (S, N) rho - R
    angle_rate_error: np.ndarray      # (S, N) angle rate - omega
    spacing_error: np.ndarray         # (S, N) circular distance of spacing from desired
    min_pairwise_distance: np.ndarray # (S,)


def observe(
    label: int,
    states: Sequence[AgentState],
    target: TargetState,
    spec: FormationSpec,
    params: ctrl.ControllerParams,
) -> ctrl.RelativeObservation:
    """Assemble what agent ``label`` (1-based) senses from global state."""
    n = spec.n
    i = label - 1
    # modular neighbors rather than RingTopology so the degenerate
    # single-agent loop (neighbors = self, spacing = 0) also evaluates
    ip = (i + 1) % n
    im = (i - 1) % n

    def rel(j: int) -> tuple[Vec2, Vec2]:
        return states[j].p - target.p0, states[j].v - target.v0

    pbar_i, vbar_i = rel(i)
    pbar_p, vbar_p = rel(ip)
    pbar_m, vbar_m = rel(im)

    def polar_angle(p: Vec2) -> float:
        return math.atan2(p.y, p.x)

    a_i, a_p, a_m = (polar_angle(p) for p in (pbar_i, pbar_p, pbar_m))
    r_i = ctrl.angular_rate(pbar_i, vbar_i, params.eps_rho)
    r_p = ctrl.angular_rate(pbar_p, vbar_p, params.eps_rho)
    r_m = ctrl.angular_rate(pbar_m, vbar_m, params.eps_rho)

    return ctrl.RelativeObservation(
        pbar=pbar_i,
        vbar=vbar_i,
        target_acc=target.a0,
        spacing_ahead=ctrl.angular_distance(a_i, a_p),
        spacing_behind=ctrl.angular_distance(a_m, a_i),
        spacing_ahead_rate=r_p - r_i,
        spacing_behind_rate=r_i - r_m,
        d_ahead=spec.spacings[i],
        d_behind=spec.spacings[im],
    )


def closed_loop_derivative(
    states: Sequence[AgentState],
    target: TargetState,
    spec: FormationSpec,
    params: ctrl.ControllerParams,
) -> list[tuple[Vec2, Vec2]]:
    """Time derivative (dp, dv) of every agent under the control law.

    Readable per-agent reference for the vectorized kernels; the kernels
    are tested against this function.
    """
    out = []
    for label in range(1, len(states) + 1):
        obs = observe(label, states, target, spec, params)
        u = ctrl.control_input(obs, spec.radii[label - 1], spec.omega, params)
        out.append((states[label - 1].v, u))
    return out


def initial_states(config: SimConfig) -> list[AgentState]:
    """Materialize the initial agent states, labeled by the ring rules.

    Random starts draw radii (area-uniform on the annulus), position
    angles, speeds, and velocity angles in that fixed order, then sort by
    label so agent 1 is the first counterclockwise from the positive
    x-axis. Explicit states are taken as already labeled.
    """
    if isinstance(config.init, ExplicitInit):
        return list(config.init.states)

    n = config.spec.n
    rng = np.random.default_rng(config.seed)
    p0 = config.target.state_at(0.0).p0
    radii = np.sqrt(rng.uniform(config.init.r_min**2, config.init.r_max**2, n))
    angles = rng.uniform(0.0, TWO_PI, n)
    speeds = config.init.v_max * np.sqrt(rng.uniform(0.0, 1.0, n))
    vangles = rng.uniform(0.0, TWO_PI, n)

    positions = [
        Vec2(p0.x + r * math.cos(a), p0.y + r * math.sin(a))
        for r, a in zip(radii, angles)
    ]
    velocities = [
        Vec2(s * math.cos(a), s * math.sin(a)) for s, a in zip(speeds, vangles)
    ]
    order = assign_labels(positions, p0, config.seed)
    return [AgentState(positions[k - 1], velocities[k - 1]) for k in order]


def _derive_series(
    config: SimConfig,
    times: np.ndarray,
    states: np.ndarray,
    target: np.ndarray,
) -> Trajectory:
    """Compute the controller-derived series from raw logged states."""
    spec, params = config.spec, config.params
    pos = states[:, :, 0:2]
    vel = states[:, :, 2:4]
    bx = pos[:, :, 0] - target[:, None, 0]
    by = pos[:, :, 1] - target[:, None, 1]
    bvx = vel[:, :, 0] - target[:, None, 2]
    bvy = vel[:, :, 1] - target[:, None, 3]

    rho = np.hypot(bx, by)
    rho_c = np.maximum(rho, params.eps_rho)
    angle = np.mod(np.arctan2(by, bx), TWO_PI)
    rate = (bx * bvy - by * bvx) / rho_c**2

    spacing = np.mod(np.roll(angle, -1, axis=1) - angle, TWO_PI)
    spacing_rate = np.roll(rate, -1, axis=1) - rate

    d = spec.spacings_array()
    d_behind = np.roll(d, 1)
    term = params.lambda1 * spacing + params.lambda2 * spacing_rate
    f = (d_behind * term - d * np.roll(term, 1, axis=1)) / (d + d_behind)
    gain = spec.omega + f

    r_des = spec.radii_array()
    e = -params.mu * (rho_c - r_des) * rho_c**params.sigma - spec.omega * (spec.omega - 1.0)
    control = np.empty_like(pos)
    control[:, :, 0] = e * bx - gain * by - bvx - bvy + target[:, None, 4]
    control[:, :, 1] = gain * bx + e * by + bvx - bvy + target[:, None, 5]

    return Trajectory(
        config=config,
        times=times,
        positions=pos,
        velocities=vel,
        target_positions=target[:, 0:2],
        target_velocities=target[:, 2:4],
        target_accelerations=target[:, 4:6],
        rho=rho,
        angle=angle,
        angle_rate=rate,
        spacing=spacing,
        spacing_rate=spacing_rate,
        rotation_gain=gain,
        control=control,
    )


def integrate(config: SimConfig, backend: str = "auto") -> Trajectory:
    """Run the closed loop from t=0 to t_end and log every step.

    Raises :class:`InvalidConfig` for an inadmissible configuration and
    :class:`SimulationDiverged` if any state stops being finite, naming
    the step and agent.
    """
    violations = validate_config(config)
    if violations:
        raise InvalidConfig(violations)

    init = initial_states(config)
    init_arr = np.array(
        [[s.p.x, s.p.y, s.v.x, s.v.y] for s in init], dtype=float
    )
    n_steps = int(round(config.t_end / config.dt))
    kind, tparams = config.target.kernel_params()

    kernel = get_kernel(backend)
    states, target, bad_step, bad_agent = kernel.run_closed_loop(
        init_arr,
        config.spec.radii_array(),
        config.spec.spacings_array(),
        config.spec.omega,
        config.params.lambda1,
        config.params.lambda2,
        config.params.mu,
        config.params.sigma,
        config.params.eps_rho,
        kind,
        tparams,
        config.dt,
        n_steps,
    )
    if bad_step >= 0:
        raise SimulationDiverged(bad_step, bad_agent + 1, bad_step * config.dt)

    times = np.arange(n_steps + 1) * config.dt
    return _derive_series(config, times, states, target)


def metrics(traj: Trajectory, spec: FormationSpec) -> MetricSeries:
    """Per-step formation errors and the collision monitor."""
    d = spec.spacings_array()
    delta = np.abs(traj.spacing - d)
    spacing_error = np.minimum(delta, TWO_PI - delta)

    pos = traj.positions
    if traj.n_agents > 1:
        diff = pos[:, :, None, :] - pos[:, None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        iu = np.triu_indices(traj.n_agents, k=1)
        min_dist = dist[:, iu[0], iu[1]].min(axis=1)
    else:
        min_dist = np.full(len(traj.times), np.inf)

    return MetricSeries(
        times=traj.times,
        radius_error=traj.rho - spec.radii_array(),
        angle_rate_error=traj.angle_rate - spec.omega,
        spacing_error=spacing_error,
        min_pairwise_distance=min_dist,
    )


def with_overrides(
    config: SimConfig,
    seed: int | None = None,
    dt: float | None = None,
    t_end: float | None = None,
) -> SimConfig:
    """Copy of ``config`` with any provided scalar overridden."""
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if dt is not None:
        updates["dt"] = dt
    if t_end is not None:
        updates["t_end"] = t_end
    return replace(config, **updates) if updates else config
