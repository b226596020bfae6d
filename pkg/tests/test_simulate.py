import math
from dataclasses import replace

import numpy as np
import pytest

from ringform.controller import ControllerParams
from ringform.formation import FormationSpec, equal_spacing
from ringform.geometry import TWO_PI, Vec2
from ringform.simulate import (
    AgentState,
    ExplicitInit,
    InvalidConfig,
    RandomAnnulusInit,
    SimConfig,
    SimulationDiverged,
    closed_loop_derivative,
    initial_states,
    integrate,
    metrics,
    with_overrides,
)
from ringform.targets import TargetModel
from ringform._backend import available_backends


def circling_states(spec: FormationSpec, start_angle: float = 0.3) -> list[AgentState]:
    angles = start_angle + np.concatenate([[0.0], np.cumsum(spec.spacings[:-1])])
    states = []
    for i, a in enumerate(angles):
        r, w = spec.radii[i], spec.omega
        states.append(
            AgentState(
                Vec2(r * math.cos(a), r * math.sin(a)),
                Vec2(-w * r * math.sin(a), w * r * math.cos(a)),
            )
        )
    return states


def small_config(**overrides) -> SimConfig:
    base = dict(
        spec=equal_spacing(4, 1.0, omega=1.0),
        params=ControllerParams(sigma=-1.0),
        target=TargetModel(kind="static"),
        dt=1e-3,
        t_end=1.0,
        seed=3,
        init=RandomAnnulusInit(),
    )
    base.update(overrides)
    return SimConfig(**base)


def test_derivative_at_circling_equilibrium_is_uniform_rotation():
    spec = FormationSpec(
        spacings=(1.1, 0.9, 1.3, 2 * math.pi - 3.3), radii=(1.0, 0.7, 1.2, 0.9), omega=1.0
    )
    states = circling_states(spec)
    target = TargetModel(kind="static").state_at(0.0)
    derivs = closed_loop_derivative(states, target, spec, ControllerParams())
    for (dp, dv), state, radius in zip(derivs, states, spec.radii):
        # dp is the tangential velocity; dv must be purely centripetal
        assert dp.dot(state.p) == pytest.approx(0.0, abs=1e-12)
        expected = -spec.omega**2
        assert dv.x == pytest.approx(expected * state.p.x, abs=1e-12)
        assert dv.y == pytest.approx(expected * state.p.y, abs=1e-12)


def test_derivative_at_resting_equilibrium_is_zero():
    spec = equal_spacing(5, 1.4, omega=0.0)
    states = [AgentState(s.p, Vec2(0.0, 0.0)) for s in circling_states(spec)]
    target = TargetModel(kind="static").state_at(0.0)
    for dp, dv in closed_loop_derivative(states, target, spec, ControllerParams()):
        assert (dp.x, dp.y) == (0.0, 0.0)
        assert dv.x == pytest.approx(0.0, abs=5e-15)
        assert dv.y == pytest.approx(0.0, abs=5e-15)


def test_derivative_single_agent_at_origin_sigma_zero():
    # the all-at-target fixed point: zero field, but unstable (see
    # stability tests for the two right-half-plane roots)
    spec = FormationSpec(spacings=(TWO_PI,), radii=(1.0,), omega=1.0)
    states = [AgentState(Vec2(0.0, 0.0), Vec2(0.0, 0.0))]
    target = TargetModel(kind="static").state_at(0.0)
    (dp, dv), = closed_loop_derivative(states, target, spec, ControllerParams(sigma=0.0))
    assert (dp.x, dp.y) == (0.0, 0.0)
    assert (dv.x, dv.y) == (0.0, 0.0)


def test_integrate_rejects_inadmissible_spec():
    bad = small_config(spec=FormationSpec(spacings=(1.0,) * 4, radii=(1.0,) * 4, omega=0.0))
    with pytest.raises(InvalidConfig) as err:
        integrate(bad)
    assert any("sum" in v for v in err.value.violations)


def test_integrate_rejects_oversized_eps_rho():
    bad = small_config(params=ControllerParams(eps_rho=0.5))
    with pytest.raises(InvalidConfig) as err:
        integrate(bad)
    assert any("eps_rho" in v for v in err.value.violations)


def test_zero_duration_run_has_two_samples():
    config = small_config(t_end=1e-3)
    traj = integrate(config)
    assert len(traj.times) == 2
    init = initial_states(config)
    logged = [AgentState(Vec2(*traj.positions[0, i]), Vec2(*traj.velocities[0, i]))
              for i in range(4)]
    assert logged == init


def test_integrate_is_deterministic():
    config = small_config()
    a = integrate(config)
    b = integrate(config)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.velocities, b.velocities)


def test_backends_agree():
    config = small_config(t_end=0.5)
    results = {name: integrate(config, backend=name) for name in available_backends()}
    if len(results) < 2:
        pytest.skip("compiled kernel not built")
    a, b = results["compiled"], results["python"]
    assert np.allclose(a.positions, b.positions, atol=1e-12, rtol=0.0)
    assert np.allclose(a.velocities, b.velocities, atol=1e-12, rtol=0.0)


def test_kernel_first_step_matches_reference_derivative():
    # one explicit-Euler-free check: RK4 stage 1 uses the same field as
    # closed_loop_derivative, so a single tiny step must match the
    # hand-stepped RK4 built on the reference implementation
    config = small_config(t_end=1e-3, dt=1e-3, init=ExplicitInit(tuple(
        AgentState(Vec2(1.0 + 0.1 * i, 0.2 * i), Vec2(0.05 * i, -0.1)) for i in range(4)
    )))
    traj = integrate(config)

    spec, params, dt = config.spec, config.params, config.dt
    states = list(config.init.states)

    def field(sts, t):
        target = config.target.state_at(t)
        return closed_loop_derivative(sts, target, spec, params)

    def shift(sts, ks, h):
        return [
            AgentState(s.p + h * k[0], s.v + h * k[1]) for s, k in zip(sts, ks)
        ]

    k1 = field(states, 0.0)
    k2 = field(shift(states, k1, dt / 2), dt / 2)
    k3 = field(shift(states, k2, dt / 2), dt / 2)
    k4 = field(shift(states, k3, dt), dt)
    for i, s in enumerate(states):
        p = s.p + (dt / 6) * (k1[i][0] + 2 * k2[i][0] + 2 * k3[i][0] + k4[i][0])
        v = s.v + (dt / 6) * (k1[i][1] + 2 * k2[i][1] + 2 * k3[i][1] + k4[i][1])
        assert traj.positions[1, i, 0] == pytest.approx(p.x, abs=1e-14)
        assert traj.positions[1, i, 1] == pytest.approx(p.y, abs=1e-14)
        assert traj.velocities[1, i, 0] == pytest.approx(v.x, abs=1e-14)
        assert traj.velocities[1, i, 1] == pytest.approx(v.y, abs=1e-14)


def test_gap_sum_identity_along_trajectory():
    traj = integrate(small_config(t_end=3.0))
    assert np.abs(traj.spacing.sum(axis=1) - TWO_PI).max() < 1e-9


def test_translation_equivariance_of_closed_loop():
    offset = Vec2(12.5, -3.75)
    spec = equal_spacing(3, 1.0, omega=0.8)
    states = circling_states(spec)
    base = small_config(
        spec=spec,
        t_end=0.5,
        target=TargetModel(kind="constant-velocity", velocity=Vec2(0.05, 0.03)),
        init=ExplicitInit(tuple(states)),
    )
    shifted = replace(
        base,
        target=base.target.shifted(offset),
        init=ExplicitInit(tuple(AgentState(s.p + offset, s.v) for s in states)),
    )
    a, b = integrate(base), integrate(shifted)
    assert np.abs((b.positions - a.positions)[:, :, 0] - offset.x).max() < 1e-9
    assert np.abs((b.positions - a.positions)[:, :, 1] - offset.y).max() < 1e-9
    assert np.abs(b.velocities - a.velocities).max() < 1e-9


def test_single_agent_circling_is_locally_stable():
    # start near the circling fixed point; the radial error must decay
    # below 1e-6 (slowest closed-loop mode has decay rate ~0.43). The
    # single-agent loop runs at the kernel level: a one-ring is outside
    # the admissible-formation contract but the converging part is the
    # same field with the layout term structurally zero.
    from ringform._backend import get_kernel

    kernel = get_kernel("auto")
    init = np.array([[1.05, 0.0, 0.0, 1.02]])
    states, _, bad, _ = kernel.run_closed_loop(
        init,
        np.array([1.0]),
        np.array([TWO_PI]),
        1.0, 1.0, 1.0, 1.0, -1.0, 1e-9,
        0, np.zeros(6), 1e-3, 40_000,
    )
    assert bad == -1
    rho = np.hypot(states[-1, 0, 0], states[-1, 0, 1])
    assert abs(rho - 1.0) < 1e-6
    rate = (states[-1, 0, 0] * states[-1, 0, 3] - states[-1, 0, 1] * states[-1, 0, 2]) / rho**2
    assert abs(rate - 1.0) < 1e-6


def test_divergence_reports_step_and_agent():
    # a step far beyond the stability region makes RK4 blow up fast
    config = small_config(dt=100.0, t_end=10_000.0)
    with pytest.raises(SimulationDiverged) as err:
        integrate(config)
    assert err.value.step > 0
    assert 1 <= err.value.agent <= 4


def test_metrics_at_equilibrium_are_tiny():
    spec = equal_spacing(4, 1.0, omega=1.0)
    config = small_config(
        spec=spec, t_end=0.1, init=ExplicitInit(tuple(circling_states(spec)))
    )
    m = metrics(integrate(config), spec)
    assert np.abs(m.radius_error).max() < 1e-10
    assert np.abs(m.angle_rate_error).max() < 1e-10
    assert np.abs(m.spacing_error).max() < 1e-10


def test_metrics_min_distance_zero_for_coincident_agents():
    spec = equal_spacing(2, 1.0, omega=0.0)
    states = (
        AgentState(Vec2(1.0, 0.0), Vec2(0.0, 0.0)),
        AgentState(Vec2(1.0, 0.0), Vec2(0.0, 0.0)),
    )
    config = small_config(spec=spec, t_end=1e-3, init=ExplicitInit(states))
    m = metrics(integrate(config), spec)
    assert m.min_pairwise_distance[0] == 0.0


def test_random_init_labels_counterclockwise():
    config = small_config(seed=11)
    states = initial_states(config)
    angles = [math.atan2(s.p.y, s.p.x) % TWO_PI for s in states]
    gaps = np.mod(np.roll(angles, -1) - angles, TWO_PI)
    assert gaps.sum() == pytest.approx(TWO_PI, abs=1e-9)


def test_seed_changes_initial_states():
    a = initial_states(small_config(seed=1))
    b = initial_states(small_config(seed=2))
    assert a != b
