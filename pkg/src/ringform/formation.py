"""Desired formation pattern, ring topology, and initial labeling rules.

A formation prescribes, per agent, the angular spacing to its next
neighbor (``spacings``), the distance to the target (``radii``), and a
common angular velocity ``omega`` about the target. Agents are labeled
1..N and connected in an undirected ring, so agent i talks only to
``i-1`` and ``i+1`` (wrapping at the ends).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, Vec2, wrap_angle

SPACING_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FormationSpec:
    """Desired distribution pattern around the target.

    ``spacings[i]`` is the desired counterclockwise angle from agent i+1
    to agent i+2 (labels are 1-based), ``radii[i]`` the desired distance
    of agent i+1 from the target. Construction never raises on an
    inadmissible pattern; use :func:`validate` to obtain violations.
    """

    spacings: tuple[float, ...]
    radii: tuple[float, ...]
    omega: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "spacings", tuple(float(v) for v in self.spacings))
        object.__setattr__(self, "radii", tuple(float(v) for v in self.radii))

    @property
    def n(self) -> int:
        return len(self.spacings)

    def spacings_array(self) -> np.ndarray:
        return np.asarray(self.spacings, dtype=float)

    def radii_array(self) -> np.ndarray:
        return np.asarray(self.radii, dtype=float)


def equal_spacing(n: int, radii, omega: float) -> FormationSpec:
    """Formation with uniform angular spacing ``2*pi/n``.

    ``radii`` may be a scalar (shared by all agents) or a length-n
    sequence.
    """
    if n < 2:
        raise ValueError(f"need at least 2 agents, got {n}")
    if np.isscalar(radii):
        radii = (float(radii),) * n
    else:
        radii = tuple(float(r) for r in radii)
        if len(radii) != n:
            raise ValueError(f"expected {n} radii, got {len(radii)}")
    return FormationSpec(spacings=(TWO_PI / n,) * n, radii=radii, omega=float(omega))


def validate(spec: FormationSpec) -> list[str]:
    """Check admissibility; returns a list of violations (empty if admissible).

    Violations are data, not faults: an inadmissible spec is constructed
    normally and rejected here with one message per failed condition.
    """
    violations: list[str] = []
    if spec.n < 2:
        violations.append(f"need at least 2 agents, got {spec.n}")
    if len(spec.radii) != spec.n:
        violations.append(
            f"spacings and radii lengths differ ({spec.n} vs {len(spec.radii)})"
        )
    for i, d in enumerate(spec.spacings, start=1):
        if not (d > 0.0) or not math.isfinite(d):
            violations.append(f"spacing d_{i} = {d} is not positive")
    for i, r in enumerate(spec.radii, start=1):
        if not (r > 0.0) or not math.isfinite(r):
            violations.append(f"radius R_{i} = {r} is not positive")
    total = math.fsum(spec.spacings)
    if abs(total - TWO_PI) > SPACING_SUM_TOL:
        violations.append(
            f"spacings sum to {total!r}, expected 2*pi (|error| = {abs(total - TWO_PI):.3e})"
        )
    if not math.isfinite(spec.omega):
        violations.append(f"omega = {spec.omega} is not finite")
    return violations


@dataclass(frozen=True)
class RingTopology:
    """Undirected ring over agents labeled 1..n."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"ring needs at least 2 agents, got {self.n}")

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise ValueError(f"agent label {i} out of range 1..{self.n}")

    def neighbor_plus(self, i: int) -> int:
        """Next agent counterclockwise: i+1, wrapping N -> 1."""
        self._check(i)
        return 1 if i == self.n else i + 1

    def neighbor_minus(self, i: int) -> int:
        """Previous agent: i-1, wrapping 1 -> N."""
        self._check(i)
        return self.n if i == 1 else i - 1


def assign_labels(positions: list[Vec2], target: Vec2, rng_seed: int) -> tuple[int, ...]:
    """Order agents for ring labeling from their initial positions.

    Sorting rules: ascending polar angle about the target measured
    counterclockwise from the positive x-axis; ties on the same ray break
    by ascending distance to the target; exactly coincident positions are
    ordered randomly using ``rng_seed``. Returns the 1-based indices of
    the input positions in label order (rank k holds the input index of
    the agent that becomes label k+1).
    """
    keys = []
    for idx, p in enumerate(positions):
        rel = p - target
        if rel.x == 0.0 and rel.y == 0.0:
            raise ValueError(
                f"position {idx + 1} coincides with the target; labeling undefined"
            )
        keys.append((wrap_angle(math.atan2(rel.y, rel.x)), rel.norm(), idx))

    rng = np.random.default_rng(rng_seed)
    order = sorted(range(len(positions)), key=lambda idx: keys[idx][:2])

    # shuffle runs of exactly coincident positions with the seeded rng
    result: list[int] = []
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and positions[order[j]] == positions[order[i]]:
            j += 1
        group = order[i:j]
        if len(group) > 1:
            group = [group[k] for k in rng.permutation(len(group))]
        result.extend(group)
        i = j
    return tuple(idx + 1 for idx in result)
