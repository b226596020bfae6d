"""Equilibrium catalog and stability checks for the closed loop.

Works in the polar chart of the target-relative state: radial distance,
relative speed, the angle between velocity and radial directions, and
the polar angle. Classifies a configuration against the known fixed
points of the closed loop, evaluates the chart's residuals, and runs the
single-agent characteristic-polynomial and Routh-array analyses.

Equilibrium families (per-agent sets: V2 = at the target point, V1a =
moving, V1b = at rest away from the target):

- ``circling``          every agent rotates on its own circle (omega != 0)
- ``resting``           every agent at rest on its circle (omega = 0)
- ``all_at_target``     every agent sits at the target with zero speed
- ``one_at_target``     one agent at the target, the rest at rest on
                        their circles, gaps frozen away from the desired
                        pattern (omega != 0)
- ``one_at_target_rest`` same but omega = 0; gaps match the pattern
- ``several_at_target`` more than one agent at the target, rest at rest
- ``none``              not an equilibrium of the catalog
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .controller import ControllerParams
from .formation import FormationSpec
from .geometry import TWO_PI, Vec2, circular_distance, to_polar, wrap_angle


@dataclass(frozen=True)
class PolarState:
    """Target-relative state of one agent in polar form."""

    rho: float     # distance to target
    speed: float   # relative speed
    beta: float    # velocity heading minus polar angle, in [0, 2*pi)
    angle: float   # polar angle, in [0, 2*pi)

    @staticmethod
    def from_cartesian(pbar: Vec2, vbar: Vec2) -> "PolarState":
        dec = to_polar(pbar, vbar)
        return PolarState(rho=dec.rho, speed=dec.speed, beta=dec.beta, angle=dec.angle)

    def pbar(self) -> Vec2:
        return Vec2(self.rho * math.cos(self.angle), self.rho * math.sin(self.angle))

    def vbar(self) -> Vec2:
        heading = self.angle + self.beta
        return Vec2(self.speed * math.cos(heading), self.speed * math.sin(heading))


class PolarResidual(NamedTuple):
    """Chart derivatives; entries are None where the chart is singular."""

    drho: float
    dspeed: float
    dbeta: Optional[float]
    dangle: Optional[float]


def polar_residual(state: PolarState, gamma: float, e: float) -> PolarResidual:
    """Time derivatives of the polar chart under gains ``gamma`` and ``e``.

    The beta equation divides by both speed and rho, so it is undefined
    (returned as None, never silently zeroed) when either vanishes. The
    angle rate is zero by convention when the speed vanishes and
    undefined at the target point with nonzero speed.
    """
    rho, speed, beta = state.rho, state.speed, state.beta
    cb, sb = math.cos(beta), math.sin(beta)
    drho = speed * cb
    dspeed = rho * (e * cb + gamma * sb) - speed

    if speed > 0.0 and rho > 0.0:
        dbeta = 1.0 - (rho / speed) * (e * sb - gamma * cb) - (speed / rho) * sb
    else:
        dbeta = None

    if speed == 0.0:
        dangle: Optional[float] = 0.0
    elif rho > 0.0:
        dangle = (speed / rho) * sb
    else:
        dangle = None
    return PolarResidual(drho, dspeed, dbeta, dangle)


@dataclass(frozen=True)
class EquilibriumLabel:
    case: str
    moving: tuple[int, ...]      # labels with nonzero speed (V1a)
    resting: tuple[int, ...]     # labels at rest away from the target (V1b)
    at_target: tuple[int, ...]   # labels at the target point (V2)
    residual: float


def _spacings(states: Sequence[PolarState]) -> np.ndarray:
    angles = np.array([s.angle for s in states])
    return np.mod(np.roll(angles, -1) - angles, TWO_PI)


def _stationarity_residual(
    states: Sequence[PolarState],
    spec: FormationSpec,
    params: ControllerParams,
) -> float:
    """Largest defined polar-chart derivative under the full control law."""
    n = len(states)
    spacings = _spacings(states)
    rates = np.zeros(n)
    for i, s in enumerate(states):
        if s.speed > 0.0 and s.rho > 0.0:
            rates[i] = (s.speed / s.rho) * math.sin(s.beta)
    spacing_rates = np.roll(rates, -1) - rates

    d = spec.spacings_array()
    d_behind = np.roll(d, 1)
    term = params.lambda1 * spacings + params.lambda2 * spacing_rates
    f = (d_behind * term - d * np.roll(term, 1)) / (d + d_behind)

    worst = 0.0
    for i, s in enumerate(states):
        rho_c = max(s.rho, params.eps_rho)
        e = -params.mu * (rho_c - spec.radii[i]) * rho_c**params.sigma - spec.omega * (
            spec.omega - 1.0
        )
        res = polar_residual(s, spec.omega + f[i], e)
        worst = max(worst, abs(res.drho), abs(res.dspeed))
        if res.dbeta is not None:
            worst = max(worst, abs(res.dbeta))
    return worst


def classify_equilibrium(
    states: Sequence[PolarState],
    spec: FormationSpec,
    params: ControllerParams,
    tol: float = 1e-6,
) -> EquilibriumLabel:
    """Match a configuration against the equilibrium catalog.

    Agents split by ``rho**2 + speed**2`` against ``tol`` into at-target
    and away sets, the away set by speed into moving and resting. Gap
    values for the families that pin them are compared by circular
    distance; the families with initial-condition-dependent gaps are only
    required to be stationary. Returns case ``none`` with the residual
    when nothing matches.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    n = len(states)
    at_target, moving, resting = [], [], []
    for label, s in enumerate(states, start=1):
        if s.rho * s.rho + s.speed * s.speed <= tol:
            at_target.append(label)
        elif s.speed > tol:
            moving.append(label)
        else:
            resting.append(label)

    residual = _stationarity_residual(states, spec, params)
    label = EquilibriumLabel(
        case="none",
        moving=tuple(moving),
        resting=tuple(resting),
        at_target=tuple(at_target),
        residual=residual,
    )
    spacings = _spacings(states)
    d = spec.spacings_array()
    spacing_ok = bool(
        np.max([circular_distance(a, b) for a, b in zip(spacings, d)]) <= tol
    )
    omega = spec.omega

    def on_circles(labels: list[int]) -> bool:
        return all(abs(states[k - 1].rho - spec.radii[k - 1]) <= tol for k in labels)

    if len(at_target) == n:
        return _replace_case(label, "all_at_target")

    if not at_target:
        if omega != 0.0 and len(moving) == n and spacing_ok and on_circles(moving):
            speeds_ok = all(
                abs(states[k - 1].speed - abs(omega * spec.radii[k - 1])) <= tol
                for k in moving
            )
            target_beta = wrap_angle(math.pi / 2.0 if omega > 0.0 else -math.pi / 2.0)
            betas_ok = all(
                circular_distance(states[k - 1].beta, target_beta) <= tol
                for k in moving
            )
            if speeds_ok and betas_ok:
                return _replace_case(label, "circling")
        if omega == 0.0 and len(resting) == n and spacing_ok and on_circles(resting):
            return _replace_case(label, "resting")
        return label

    # mixed: any moving agent rules out an equilibrium entirely
    if moving or not on_circles(resting):
        return label
    if len(at_target) == 1:
        if omega == 0.0:
            return _replace_case(label, "one_at_target_rest" if spacing_ok else "none")
        return _replace_case(label, "one_at_target")
    return _replace_case(label, "several_at_target")


def _replace_case(label: EquilibriumLabel, case: str) -> EquilibriumLabel:
    return EquilibriumLabel(
        case=case,
        moving=label.moving,
        resting=label.resting,
        at_target=label.at_target,
        residual=label.residual,
    )


def charpoly_circling(omega: float, mu: float, radius: float, sigma: float) -> np.ndarray:
    """Characteristic polynomial at the single-agent circling equilibrium.

    Coefficients (highest degree first) of
    ``x**3 + 2*x**2 + ((2*omega - 1)**2 + 1 + mu*radius**(sigma + 1))*x
    + mu*radius**(sigma + 1)``. Only defined for nonzero omega.
    """
    if omega == 0.0:
        raise ValueError("circling equilibrium requires nonzero omega")
    if not (mu > 0.0 and radius > 0.0):
        raise ValueError("mu and radius must be positive")
    k = mu * radius ** (sigma + 1.0)
    return np.array([1.0, 2.0, (2.0 * omega - 1.0) ** 2 + 1.0 + k, k])


def charpoly_resting_roots(
    mu: float, radius: float, sigma: float, beta: float = 0.0
) -> np.ndarray:
    """Eigenvalues at the single-agent resting equilibrium (omega = 0).

    The polynomial factors as ``(x + 1)(x**2 + x + mu*radius**(sigma+1)*cos(beta)**2)``;
    at the equilibrium value beta = 0 all roots are strictly stable.
    """
    if not (mu > 0.0 and radius > 0.0):
        raise ValueError("mu and radius must be positive")
    k = mu * radius ** (sigma + 1.0) * math.cos(beta) ** 2
    quad = np.roots([1.0, 1.0, k])
    return np.concatenate([[-1.0], quad])


def charpoly_at_target(omega: float, mu: float, radius: float) -> np.ndarray:
    """Characteristic polynomial at the all-at-target equilibrium, sigma = 0.

    Degree four; the constant term ``(omega*(omega-1) - mu*radius)**2 + omega**2``
    couples both planar axes.
    """
    if not (mu > 0.0 and radius > 0.0):
        raise ValueError("mu and radius must be positive")
    mr = mu * radius
    c = omega * (omega - 1.0) - mr
    return np.array(
        [
            1.0,
            2.0,
            2.0 * (omega * omega - omega - mr + 1.0),
            2.0 * (omega * omega - mr),
            c * c + omega * omega,
        ]
    )


@dataclass(frozen=True)
class RouthTable:
    """Routh array with degeneracy flags.

    ``epsilon_used`` marks a zero first-column pivot replaced by a small
    positive epsilon; ``boundary`` marks an all-zero row (imaginary-axis
    roots), resolved by differentiating the auxiliary polynomial. Counts
    from flagged tables should not feed automated accept/reject logic.
    """

    rows: tuple[tuple[float, ...], ...]
    first_column: tuple[float, ...]
    sign_changes: int
    epsilon_used: bool
    boundary: bool


def routh_sign_changes(coeffs) -> tuple[RouthTable, int]:
    """Routh array of a polynomial and its first-column sign-change count.

    The count equals the number of open-right-half-plane roots for
    non-degenerate polynomials. Leading coefficient must be nonzero.
    """
    c = np.asarray(coeffs, dtype=float)
    if len(c) == 0 or c[0] == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    n = len(c)
    degree = n - 1
    if degree == 0:
        table = RouthTable(((c[0],),), (c[0],), 0, False, False)
        return table, 0

    width = (degree // 2) + 1
    rows = np.zeros((n, width))
    rows[0, : len(c[0::2])] = c[0::2]
    rows[1, : len(c[1::2])] = c[1::2]

    eps = 1e-12 * max(1.0, np.abs(c).max())
    epsilon_used = False
    boundary = False

    for r in range(2, n):
        upper2, upper1 = rows[r - 2], rows[r - 1]
        if np.all(upper1 == 0.0):
            # all-zero row: replace with the derivative of the auxiliary
            # polynomial formed from the row above
            boundary = True
            aux_degree = degree - (r - 2)
            powers = np.arange(aux_degree, -1, -2, dtype=float)
            repl = upper2[: len(powers)] * powers
            rows[r - 1, : len(repl)] = repl
            upper1 = rows[r - 1]
        pivot = upper1[0]
        if pivot == 0.0:
            epsilon_used = True
            pivot = eps
            rows[r - 1, 0] = eps
        for j in range(width - 1):
            rows[r, j] = (pivot * upper2[j + 1] - upper2[0] * upper1[j + 1]) / pivot

    first_col = rows[:, 0].copy()
    signs = np.sign(first_col)
    changes = 0
    prev = signs[0]
    for s in signs[1:]:
        if s == 0.0:
            boundary = True
            continue
        if s != prev:
            changes += 1
        prev = s

    table = RouthTable(
        rows=tuple(tuple(row) for row in rows),
        first_column=tuple(first_col),
        sign_changes=changes,
        epsilon_used=epsilon_used,
        boundary=boundary,
    )
    return table, changes


def rhp_root_count(coeffs, tol: float = 1e-9) -> int:
    """Open-right-half-plane root count by direct root finding."""
    roots = np.roots(np.asarray(coeffs, dtype=float))
    return int(np.sum(roots.real > tol))
