"""Closed-form target trajectories.

Each model provides mutually consistent position, velocity, and
acceleration at any query time (velocity and acceleration are the exact
analytic derivatives), so the integrator can sample them at stage times
without drift between the feedforward term and the actual target motion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Vec2

KIND_STATIC = 0
KIND_CONSTANT_VELOCITY = 1
KIND_CIRCULAR = 2
KIND_SINUSOIDAL = 3

_KIND_NAMES = {
    "static": KIND_STATIC,
    "constant-velocity": KIND_CONSTANT_VELOCITY,
    "circular": KIND_CIRCULAR,
    "sinusoidal": KIND_SINUSOIDAL,
}


@dataclass(frozen=True)
class TargetState:
    p0: Vec2
    v0: Vec2
    a0: Vec2


@dataclass(frozen=True)
class TargetModel:
    """One of four closed-form motions.

    static:             stays at ``position``.
    constant-velocity:  ``position + velocity * t``.
    circular:           circle of ``radius`` about ``position`` at
                        ``angular_rate`` rad/s starting at ``phase``.
    sinusoidal:         drifts along x at ``speed_x`` while y oscillates
                        with ``amplitude`` at ``frequency`` Hz.
    """

    kind: str = "static"
    position: Vec2 = Vec2(0.0, 0.0)
    velocity: Vec2 = Vec2(0.0, 0.0)
    radius: float = 1.0
    angular_rate: float = 1.0
    phase: float = 0.0
    speed_x: float = 0.0
    amplitude: float = 0.0
    frequency: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in _KIND_NAMES:
            raise ValueError(
                f"unknown target kind {self.kind!r}; expected one of {sorted(_KIND_NAMES)}"
            )

    def state_at(self, t: float) -> TargetState:
        code, p = self.kernel_params()
        x0, y0, vx, vy, ax, ay = _evaluate(code, p, t)
        return TargetState(Vec2(x0, y0), Vec2(vx, vy), Vec2(ax, ay))

    def shifted(self, offset: Vec2) -> "TargetModel":
        """Same motion translated by a constant offset."""
        return TargetModel(
            kind=self.kind,
            position=self.position + offset,
            velocity=self.velocity,
            radius=self.radius,
            angular_rate=self.angular_rate,
            phase=self.phase,
            speed_x=self.speed_x,
            amplitude=self.amplitude,
            frequency=self.frequency,
        )

    def kernel_params(self) -> tuple[int, np.ndarray]:
        """Flat (kind code, parameter vector) encoding used by the kernels."""
        p = np.zeros(6)
        p[0] = self.position.x
        p[1] = self.position.y
        kind = _KIND_NAMES[self.kind]
        if kind == KIND_CONSTANT_VELOCITY:
            p[2] = self.velocity.x
            p[3] = self.velocity.y
        elif kind == KIND_CIRCULAR:
            p[2] = self.radius
            p[3] = self.angular_rate
            p[4] = self.phase
        elif kind == KIND_SINUSOIDAL:
            p[2] = self.speed_x
            p[3] = self.amplitude
            p[4] = 2.0 * math.pi * self.frequency
        return kind, p


def _evaluate(code: int, p: np.ndarray, t: float):
    """Reference evaluation of the closed forms; mirrors both kernels."""
    if code == KIND_STATIC:
        return p[0], p[1], 0.0, 0.0, 0.0, 0.0
    if code == KIND_CONSTANT_VELOCITY:
        return p[0] + p[2] * t, p[1] + p[3] * t, p[2], p[3], 0.0, 0.0
    if code == KIND_CIRCULAR:
        r, w, phase = p[2], p[3], p[4]
        a = w * t + phase
        c, s = math.cos(a), math.sin(a)
        return (
            p[0] + r * c,
            p[1] + r * s,
            -r * w * s,
            r * w * c,
            -r * w * w * c,
            -r * w * w * s,
        )
    if code == KIND_SINUSOIDAL:
        vx, amp, w = p[2], p[3], p[4]
        s, c = math.sin(w * t), math.cos(w * t)
        return p[0] + vx * t, p[1] + amp * s, vx, amp * w * c, 0.0, -amp * w * w * s
    raise ValueError(f"unknown target kind code {code}")
