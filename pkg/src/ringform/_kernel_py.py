"""Pure-numpy closed-loop integration kernel.

Fallback used when the compiled extension is unavailable. Implements the
same fixed-step fourth-order Runge-Kutta loop as ``_kernel.pyx``,
vectorized over agents; the two kernels agree to floating-point noise
and are benchmarked against each other in ``benchmarks/``.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

COMPILED = False


def _target_state(kind: int, p: np.ndarray, t: float) -> tuple[float, ...]:
    if kind == 0:  # static
        return p[0], p[1], 0.0, 0.0, 0.0, 0.0
    if kind == 1:  # constant velocity
        return p[0] + p[2] * t, p[1] + p[3] * t, p[2], p[3], 0.0, 0.0
    if kind == 2:  # circular
        r, w, phase = p[2], p[3], p[4]
        a = w * t + phase
        c, s = np.cos(a), np.sin(a)
        return p[0] + r * c, p[1] + r * s, -r * w * s, r * w * c, -r * w * w * c, -r * w * w * s
    if kind == 3:  # sinusoidal
        vx, amp, w = p[2], p[3], p[4]
        s, c = np.sin(w * t), np.cos(w * t)
        return p[0] + vx * t, p[1] + amp * s, vx, amp * w * c, 0.0, -amp * w * w * s
    raise ValueError(f"unknown target kind code {kind}")


def _derivative(
    y: np.ndarray,
    t: float,
    r_des: np.ndarray,
    d_des: np.ndarray,
    d_behind: np.ndarray,
    w_sum: np.ndarray,
    omega: float,
    lambda1: float,
    lambda2: float,
    mu: float,
    sigma: float,
    eps_rho: float,
    target_kind: int,
    target_params: np.ndarray,
) -> np.ndarray:
    x0, y0, vx0, vy0, ax0, ay0 = _target_state(target_kind, target_params, t)

    bx = y[:, 0] - x0
    by = y[:, 1] - y0
    bvx = y[:, 2] - vx0
    bvy = y[:, 3] - vy0

    rho = np.hypot(bx, by)
    rho_c = np.maximum(rho, eps_rho)
    angle = np.arctan2(by, bx)
    rate = (bx * bvy - by * bvx) / (rho_c * rho_c)

    spacing = np.mod(np.roll(angle, -1) - angle, TWO_PI)
    spacing_rate = np.roll(rate, -1) - rate

    term = lambda1 * spacing + lambda2 * spacing_rate
    f = (d_behind * term - d_des * np.roll(term, 1)) / w_sum

    e = -mu * (rho_c - r_des) * rho_c**sigma - omega * (omega - 1.0)
    g = omega + f

    dy = np.empty_like(y)
    dy[:, 0] = y[:, 2]
    dy[:, 1] = y[:, 3]
    dy[:, 2] = e * bx - g * by - bvx - bvy + ax0
    dy[:, 3] = g * bx + e * by + bvx - bvy + ay0
    return dy


def run_closed_loop(
    init: np.ndarray,
    r_des: np.ndarray,
    d_des: np.ndarray,
    omega: float,
    lambda1: float,
    lambda2: float,
    mu: float,
    sigma: float,
    eps_rho: float,
    target_kind: int,
    target_params: np.ndarray,
    dt: float,
    n_steps: int,
) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Integrate the N-agent closed loop with classical RK4.

    Returns ``(states, target, bad_step, bad_agent)`` where ``states``
    has shape ``(n_steps+1, n, 4)`` (x, y, vx, vy per agent), ``target``
    shape ``(n_steps+1, 6)`` (position, velocity, acceleration), and
    ``bad_step`` is -1 on success or the 0-based index of the first
    non-finite logged step (``bad_agent`` is then the 0-based offender).
    """
    y = np.array(init, dtype=float)
    n = y.shape[0]
    d_des = np.asarray(d_des, dtype=float)
    d_behind = np.roll(d_des, 1)
    w_sum = d_des + d_behind
    r_des = np.asarray(r_des, dtype=float)

    states = np.empty((n_steps + 1, n, 4))
    target = np.empty((n_steps + 1, 6))
    states[0] = y
    target[0] = _target_state(target_kind, target_params, 0.0)

    args = (
        r_des,
        d_des,
        d_behind,
        w_sum,
        omega,
        lambda1,
        lambda2,
        mu,
        sigma,
        eps_rho,
        target_kind,
        target_params,
    )
    half = 0.5 * dt
    # divergence is detected and reported, not warned about
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(n_steps):
            t = step * dt
            k1 = _derivative(y, t, *args)
            k2 = _derivative(y + half * k1, t + half, *args)
            k3 = _derivative(y + half * k2, t + half, *args)
            k4 = _derivative(y + dt * k3, t + dt, *args)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

            states[step + 1] = y
            target[step + 1] = _target_state(target_kind, target_params, t + dt)
            if not np.all(np.isfinite(y)):
                bad_agent = int(np.argwhere(~np.isfinite(y).all(axis=1))[0, 0])
                return states[: step + 2], target[: step + 2], step + 1, bad_agent

    return states, target, -1, -1
