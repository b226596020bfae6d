"""Parity checks between the compiled and pure-python integration kernels."""

import numpy as np
import pytest

from ringform._backend import HAVE_COMPILED, get_kernel
from ringform.geometry import TWO_PI

pytestmark = pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")

CASES = [
    # (omega, sigma, target_kind, target_params)
    (1.0, -1.0, 0, np.zeros(6)),
    (-0.4, 0.0, 1, np.array([0.1, -0.2, 0.05, 0.03, 0.0, 0.0])),
    (0.0, -1.0, 2, np.array([0.0, 0.0, 1.5, 0.4, 0.2, 0.0])),
    (0.7, 1.0, 3, np.array([0.0, 0.5, 0.2, 0.3, 1.1, 0.0])),
]


@pytest.mark.parametrize("omega,sigma,kind,tparams", CASES)
def test_kernels_agree_on_random_states(omega, sigma, kind, tparams):
    rng = np.random.default_rng(99)
    n = 5
    init = rng.uniform(-2.0, 2.0, (n, 4))
    init[:, :2] += np.sign(init[:, :2]) * 0.3  # keep positions off the target
    g = rng.uniform(0.1, 1.0, n)
    d = TWO_PI * g / g.sum()
    r = rng.uniform(0.4, 1.8, n)
    args = (init, r, d, omega, 1.0, 1.0, 1.0, sigma, 1e-9, kind, tparams, 1e-3, 500)

    s_c, t_c, bad_c, _ = get_kernel("compiled").run_closed_loop(*args)
    s_p, t_p, bad_p, _ = get_kernel("python").run_closed_loop(*args)
    assert bad_c == bad_p == -1
    assert np.abs(s_c - s_p).max() < 1e-11
    assert np.abs(t_c - t_p).max() < 1e-14


def test_kernels_report_divergence_identically():
    init = np.array([[1.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0]])
    d = np.full(2, np.pi)
    r = np.ones(2)
    # dt far outside the stability region: blows up within a few steps
    args = (init, r, d, 1.0, 1.0, 1.0, 1.0, 0.0, 1e-9, 0, np.zeros(6), 50.0, 200)
    s_c, _, bad_c, agent_c = get_kernel("compiled").run_closed_loop(*args)
    s_p, _, bad_p, agent_p = get_kernel("python").run_closed_loop(*args)
    assert bad_c == bad_p > 0
    assert agent_c == agent_p
    assert len(s_c) == len(s_p) == bad_c + 1


def test_kernel_logs_include_initial_state():
    init = np.array([[1.3, -0.2, 0.1, 0.4]])
    s, t, bad, _ = get_kernel("compiled").run_closed_loop(
        init, np.array([1.0]), np.array([TWO_PI]),
        1.0, 1.0, 1.0, 1.0, -1.0, 1e-9, 0, np.zeros(6), 1e-3, 3,
    )
    assert bad == -1
    assert s.shape == (4, 1, 4)
    assert np.array_equal(s[0], init)
    assert t.shape == (4, 6)
