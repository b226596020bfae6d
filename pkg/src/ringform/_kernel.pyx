# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled closed-loop integration kernel.

Mirrors ``_kernel_py.run_closed_loop`` step for step; the inner loop is
the hot path of every simulation, so it runs here as straight C over
preallocated buffers.
"""

import numpy as np

from libc.math cimport atan2, cos, fmod, hypot, isfinite, pow, sin

cdef double TWO_PI = 6.283185307179586476925287

COMPILED = True


cdef inline void target_state(int kind, const double* p, double t, double* out) noexcept nogil:
    cdef double r, w, phase, a, c, s, vx, amp
    if kind == 0:
        out[0] = p[0]; out[1] = p[1]
        out[2] = 0.0; out[3] = 0.0; out[4] = 0.0; out[5] = 0.0
    elif kind == 1:
        out[0] = p[0] + p[2] * t; out[1] = p[1] + p[3] * t
        out[2] = p[2]; out[3] = p[3]; out[4] = 0.0; out[5] = 0.0
    elif kind == 2:
        r = p[2]; w = p[3]; phase = p[4]
        a = w * t + phase
        c = cos(a); s = sin(a)
        out[0] = p[0] + r * c; out[1] = p[1] + r * s
        out[2] = -r * w * s; out[3] = r * w * c
        out[4] = -r * w * w * c; out[5] = -r * w * w * s
    else:
        vx = p[2]; amp = p[3]; w = p[4]
        s = sin(w * t); c = cos(w * t)
        out[0] = p[0] + vx * t; out[1] = p[1] + amp * s
        out[2] = vx; out[3] = amp * w * c
        out[4] = 0.0; out[5] = -amp * w * w * s


cdef void derivative(
    const double[:, ::1] y,
    double t,
    const double[::1] r_des,
    const double[::1] d_des,
    const double[::1] d_behind,
    const double[::1] w_sum,
    double omega,
    double lambda1,
    double lambda2,
    double mu,
    double sigma,
    double eps_rho,
    int target_kind,
    const double* target_params,
    double* bx,
    double* by,
    double* bvx,
    double* bvy,
    double* rate,
    double* angle,
    double* term,
    double[:, ::1] dy,
) noexcept nogil:
    cdef int n = y.shape[0]
    cdef int i, ip, im
    cdef double tstate[6]
    cdef double rho, rho_c, spacing, spacing_rate, f, e, g

    target_state(target_kind, target_params, t, tstate)

    for i in range(n):
        bx[i] = y[i, 0] - tstate[0]
        by[i] = y[i, 1] - tstate[1]
        bvx[i] = y[i, 2] - tstate[2]
        bvy[i] = y[i, 3] - tstate[3]
        rho = hypot(bx[i], by[i])
        rho_c = rho if rho > eps_rho else eps_rho
        angle[i] = atan2(by[i], bx[i])
        rate[i] = (bx[i] * bvy[i] - by[i] * bvx[i]) / (rho_c * rho_c)

    for i in range(n):
        ip = i + 1 if i + 1 < n else 0
        spacing = fmod(angle[ip] - angle[i], TWO_PI)
        if spacing < 0.0:
            spacing += TWO_PI
        spacing_rate = rate[ip] - rate[i]
        term[i] = lambda1 * spacing + lambda2 * spacing_rate

    for i in range(n):
        im = i - 1 if i > 0 else n - 1
        f = (d_behind[i] * term[i] - d_des[i] * term[im]) / w_sum[i]
        rho = hypot(bx[i], by[i])
        rho_c = rho if rho > eps_rho else eps_rho
        e = -mu * (rho_c - r_des[i]) * pow(rho_c, sigma) - omega * (omega - 1.0)
        g = omega + f
        dy[i, 0] = y[i, 2]
        dy[i, 1] = y[i, 3]
        dy[i, 2] = e * bx[i] - g * by[i] - bvx[i] - bvy[i] + tstate[4]
        dy[i, 3] = g * bx[i] + e * by[i] + bvx[i] - bvy[i] + tstate[5]


def run_closed_loop(
    init,
    r_des,
    d_des,
    double omega,
    double lambda1,
    double lambda2,
    double mu,
    double sigma,
    double eps_rho,
    int target_kind,
    target_params,
    double dt,
    int n_steps,
):
    """Compiled twin of ``_kernel_py.run_closed_loop``; same contract."""
    y_arr = np.array(init, dtype=np.float64)
    cdef int n = y_arr.shape[0]
    d_arr = np.asarray(d_des, dtype=np.float64)
    db_arr = np.roll(d_arr, 1).copy()
    ws_arr = d_arr + db_arr
    r_arr = np.ascontiguousarray(r_des, dtype=np.float64)
    tp_arr = np.ascontiguousarray(target_params, dtype=np.float64)

    states_arr = np.empty((n_steps + 1, n, 4))
    target_arr = np.empty((n_steps + 1, 6))

    cdef double[:, ::1] y = np.ascontiguousarray(y_arr)
    cdef const double[::1] rd = r_arr
    cdef const double[::1] dd = np.ascontiguousarray(d_arr)
    cdef const double[::1] db = np.ascontiguousarray(db_arr)
    cdef const double[::1] ws = np.ascontiguousarray(ws_arr)
    cdef const double[::1] tp = tp_arr
    cdef double[:, :, ::1] states = states_arr
    cdef double[:, ::1] target = target_arr

    work_arr = np.empty((7, n))
    cdef double[:, ::1] work = work_arr
    stage_arr = np.empty((5, n, 4))
    cdef double[:, :, ::1] stage = stage_arr

    cdef double[:, ::1] k1 = stage_arr[0]
    cdef double[:, ::1] k2 = stage_arr[1]
    cdef double[:, ::1] k3 = stage_arr[2]
    cdef double[:, ::1] k4 = stage_arr[3]
    cdef double[:, ::1] ytmp = stage_arr[4]

    cdef double half = 0.5 * dt
    cdef double sixth = dt / 6.0
    cdef double t, v
    cdef int step, i, j
    cdef int bad_step = -1, bad_agent = -1
    cdef bint ok

    with nogil:
        for i in range(n):
            for j in range(4):
                states[0, i, j] = y[i, j]
        target_state(target_kind, &tp[0], 0.0, &target[0, 0])

        for step in range(n_steps):
            t = step * dt

            derivative(y, t, rd, dd, db, ws, omega, lambda1, lambda2, mu,
                       sigma, eps_rho, target_kind, &tp[0],
                       &work[0, 0], &work[1, 0], &work[2, 0], &work[3, 0],
                       &work[4, 0], &work[5, 0], &work[6, 0], k1)
            for i in range(n):
                for j in range(4):
                    ytmp[i, j] = y[i, j] + half * k1[i, j]
            derivative(ytmp, t + half, rd, dd, db, ws, omega, lambda1, lambda2, mu,
                       sigma, eps_rho, target_kind, &tp[0],
                       &work[0, 0], &work[1, 0], &work[2, 0], &work[3, 0],
                       &work[4, 0], &work[5, 0], &work[6, 0], k2)
            for i in range(n):
                for j in range(4):
                    ytmp[i, j] = y[i, j] + half * k2[i, j]
            derivative(ytmp, t + half, rd, dd, db, ws, omega, lambda1, lambda2, mu,
                       sigma, eps_rho, target_kind, &tp[0],
                       &work[0, 0], &work[1, 0], &work[2, 0], &work[3, 0],
                       &work[4, 0], &work[5, 0], &work[6, 0], k3)
            for i in range(n):
                for j in range(4):
                    ytmp[i, j] = y[i, j] + dt * k3[i, j]
            derivative(ytmp, t + dt, rd, dd, db, ws, omega, lambda1, lambda2, mu,
                       sigma, eps_rho, target_kind, &tp[0],
                       &work[0, 0], &work[1, 0], &work[2, 0], &work[3, 0],
                       &work[4, 0], &work[5, 0], &work[6, 0], k4)

            ok = True
            for i in range(n):
                for j in range(4):
                    v = y[i, j] + sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
                    y[i, j] = v
                    states[step + 1, i, j] = v
                    if not isfinite(v) and ok:
                        ok = False
                        bad_agent = i
            target_state(target_kind, &tp[0], t + dt, &target[step + 1, 0])
            if not ok:
                bad_step = step + 1
                break

    if bad_step >= 0:
        return states_arr[: bad_step + 1], target_arr[: bad_step + 1], bad_step, bad_agent
    return states_arr, target_arr, -1, -1
