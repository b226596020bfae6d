"""Distributed control law for circling a target in formation.

Each agent's acceleration combines a converging part, a limit cycle that
attracts it onto a circle of its prescribed radius around the target at
angular rate ``omega``, and a layout part that nudges its angular
spacing toward the prescribed gaps by comparing spacing errors with its
two ring neighbors. Only relative quantities enter the law, so it can be
evaluated in each agent's own target-aligned frame (see
:func:`control_input_local`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Vec2, wrap_angle


@dataclass(frozen=True)
class ControllerParams:
    """Gains of the control law plus the near-target singularity guard.

    ``sigma`` shapes the radial attraction (distance error is weighted by
    ``rho**sigma``); it may be negative, which makes the gain blow up as
    rho -> 0, so rho is clamped below at ``eps_rho`` wherever it enters a
    denominator or a negative power.
    """

    lambda1: float = 1.0
    lambda2: float = 1.0
    mu: float = 1.0
    sigma: float = -1.0
    eps_rho: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("lambda1", "lambda2", "mu"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be strictly positive, got {v}")
        if not (self.eps_rho > 0.0 and math.isfinite(self.eps_rho)):
            raise ValueError(f"eps_rho must be strictly positive, got {self.eps_rho}")
        if not math.isfinite(self.sigma):
            raise ValueError(f"sigma must be finite, got {self.sigma}")


@dataclass(frozen=True)
class RelativeObservation:
    """Everything agent i senses: target-relative state plus neighbor spacings.

    ``spacing_ahead`` is the counterclockwise angle from this agent's ray
    to its next neighbor's ray, ``spacing_behind`` the same for the
    previous neighbor's gap ending at this agent. ``d_ahead``/``d_behind``
    are the desired values of those two gaps (the only entries of the
    pattern available locally).
    """

    pbar: Vec2
    vbar: Vec2
    target_acc: Vec2
    spacing_ahead: float
    spacing_behind: float
    spacing_ahead_rate: float
    spacing_behind_rate: float
    d_ahead: float
    d_behind: float

    def __post_init__(self) -> None:
        for name in (
            "spacing_ahead",
            "spacing_behind",
            "spacing_ahead_rate",
            "spacing_behind_rate",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")
        if not (self.d_ahead > 0.0 and self.d_behind > 0.0):
            raise ValueError(
                f"desired spacings must be positive, got {self.d_ahead}, {self.d_behind}"
            )


def angular_distance(angle_i: float, angle_iplus: float) -> float:
    """Counterclockwise angle from ray ``angle_i`` to ray ``angle_iplus``, in [0, 2*pi)."""
    return wrap_angle(angle_iplus - angle_i)


def angular_rate(pbar: Vec2, vbar: Vec2, eps_rho: float) -> float:
    """Rate of change of the polar angle of ``pbar``, rad/s.

    Computed from the cross-product form ``(x*vy - y*vx) / rho**2``,
    which is exact and needs no differencing; rho is clamped at
    ``eps_rho`` so the rate stays finite at the target point.
    """
    rho = max(pbar.norm(), eps_rho)
    return pbar.cross(vbar) / (rho * rho)


def radial_gain(rho: float, radius: float, omega: float, params: ControllerParams) -> float:
    """Gain multiplying the radial direction of the limit cycle.

    Attracts rho toward ``radius`` with strength shaped by
    ``rho**sigma`` and carries the centripetal offset for rotation at
    ``omega``.
    """
    rho_c = max(rho, params.eps_rho)
    return -params.mu * (rho_c - radius) * rho_c**params.sigma - omega * (omega - 1.0)


def spacing_feedback(obs: RelativeObservation, params: ControllerParams) -> float:
    """Layout term: weighted difference of the two adjacent spacing errors.

    Vanishes exactly when both gaps sit at their desired values with zero
    rates, so it is inactive on the desired formation.
    """
    ahead = params.lambda1 * obs.spacing_ahead + params.lambda2 * obs.spacing_ahead_rate
    behind = params.lambda1 * obs.spacing_behind + params.lambda2 * obs.spacing_behind_rate
    wsum = obs.d_ahead + obs.d_behind
    return (obs.d_behind * ahead - obs.d_ahead * behind) / wsum


def rotation_gain(obs: RelativeObservation, omega: float, params: ControllerParams) -> float:
    """Gain multiplying the tangential direction: ``omega`` plus the layout term."""
    return omega + spacing_feedback(obs, params)


def control_input(
    obs: RelativeObservation,
    radius: float,
    omega: float,
    params: ControllerParams,
) -> Vec2:
    """Acceleration command for one agent.

    The command is linear in the relative position and velocity with a
    rotation-and-scale structure, plus the target's acceleration as a
    feedforward term.
    """
    e = radial_gain(obs.pbar.norm(), radius, omega, params)
    g = rotation_gain(obs, omega, params)
    ux = e * obs.pbar.x - g * obs.pbar.y - obs.vbar.x - obs.vbar.y + obs.target_acc.x
    uy = g * obs.pbar.x + e * obs.pbar.y + obs.vbar.x - obs.vbar.y + obs.target_acc.y
    return Vec2(ux, uy)


def control_input_local(
    obs_local: RelativeObservation,
    radius: float,
    omega: float,
    params: ControllerParams,
) -> Vec2:
    """Acceleration command evaluated in the agent's target-aligned frame.

    The law commutes with rotations (its matrices are scaled rotations
    and the remaining inputs are scalars), so evaluating the same formula
    on frame-local quantities yields the frame-local command. Feed in an
    observation whose vectors were rotated by ``rotate_into_frame`` and
    the result is the global command rotated the same way.
    """
    return control_input(obs_local, radius, omega, params)
