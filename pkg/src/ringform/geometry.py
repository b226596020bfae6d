"""Planar vector and angle primitives shared by every other module.

All angles are radians. Canonical angle range is ``[0, 2*pi)`` and
``wrap_angle`` is the single normalization used everywhere; comparisons
near the seam must go through ``circular_distance`` instead of raw
subtraction. Polar decompositions follow the convention that a zero
vector has angle 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Vec2:
    """Immutable planar vector with finite components."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite vector components ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        """z-component of the 3D cross product (signed parallelogram area)."""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


ZERO = Vec2(0.0, 0.0)


def wrap_angle(theta: float) -> float:
    """Normalize an angle to the canonical range ``[0, 2*pi)``.

    Parameters
    ----------
    theta : float
        Angle in radians; must be finite.

    Returns
    -------
    float
        ``theta`` modulo ``2*pi``, in ``[0, 2*pi)``.
    """
    if not math.isfinite(theta):
        raise ValueError(f"cannot wrap non-finite angle {theta}")
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    # fmod of a tiny negative can round up to exactly 2*pi
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def circular_distance(a: float, b: float) -> float:
    """Distance between two angles on the circle, in ``[0, pi]``.

    Raw subtraction is meaningless near the 0/2*pi seam; every angle
    comparison in tests and metrics goes through this.
    """
    delta = abs(wrap_angle(a) - wrap_angle(b))
    return min(delta, TWO_PI - delta)


class PolarDecomposition(NamedTuple):
    """Polar view of a relative position/velocity pair."""

    rho: float        # distance to the reference point
    speed: float      # magnitude of the relative velocity
    angle: float      # polar angle of the position vector, in [0, 2*pi)
    heading: float    # polar angle of the velocity vector, in [0, 2*pi)
    beta: float       # heading minus angle, wrapped to [0, 2*pi)


def to_polar(pbar: Vec2, vbar: Vec2) -> PolarDecomposition:
    """Decompose relative position and velocity into polar form.

    Zero vectors are allowed: a zero position has angle 0 and a zero
    velocity has heading 0, matching the convention used throughout the
    equilibrium analysis.
    """
    rho = pbar.norm()
    speed = vbar.norm()
    angle = wrap_angle(math.atan2(pbar.y, pbar.x)) if rho > 0.0 else 0.0
    heading = wrap_angle(math.atan2(vbar.y, vbar.x)) if speed > 0.0 else 0.0
    beta = wrap_angle(heading - angle)
    return PolarDecomposition(rho, speed, angle, heading, beta)


def rotate_into_frame(v: Vec2, frame_angle: float) -> Vec2:
    """Express ``v`` in a frame whose x-axis points along ``frame_angle``.

    Equivalent to rotating ``v`` by ``-frame_angle``.
    """
    c = math.cos(frame_angle)
    s = math.sin(frame_angle)
    return Vec2(c * v.x + s * v.y, -s * v.x + c * v.y)


def rotate(v: Vec2, angle: float) -> Vec2:
    """Rotate ``v`` counterclockwise by ``angle``."""
    c = math.cos(angle)
    s = math.sin(angle)
    return Vec2(c * v.x - s * v.y, s * v.x + c * v.y)
