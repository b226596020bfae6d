import numpy as np
import pytest

from ringform.config import load_config
from ringform.output import (
    build_report,
    metrics_from_table,
    read_trajectory_csv,
    table_from_trajectory,
    trajectory_header,
    write_trajectory_csv,
)
from ringform.simulate import integrate, with_overrides


@pytest.fixture(scope="module")
def short_run():
    config, opts = load_config("example2")
    config = with_overrides(config, t_end=2.0)
    traj = integrate(config)
    return config, opts, traj


def test_header_schema(short_run):
    config, opts, traj = short_run
    header = trajectory_header(6)
    assert len(header) == 1 + 6 * 6 + 2
    assert header[0] == "t"
    assert header[1:7] == ["x1", "y1", "vx1", "vy1", "rho1", "alpha1"]
    assert header[-2:] == ["x0", "y0"]


def test_csv_round_trips_bit_for_bit(short_run, tmp_path):
    config, opts, traj = short_run
    table = table_from_trajectory(traj, store_every=7)
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(path, table)
    back = read_trajectory_csv(path)
    assert np.array_equal(back.times, table.times)
    assert np.array_equal(back.agent_pos, table.agent_pos)
    assert np.array_equal(back.agent_vel, table.agent_vel)
    assert np.array_equal(back.rho, table.rho)
    assert np.array_equal(back.alpha, table.alpha)
    assert np.array_equal(back.target_pos, table.target_pos)


def test_csv_uses_crlf_line_endings(short_run, tmp_path):
    config, opts, traj = short_run
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(path, table_from_trajectory(traj, store_every=100))
    raw = path.read_bytes()
    assert b"\r\n" in raw
    assert raw.count(b"\n") == raw.count(b"\r\n")


def test_thinning_always_keeps_final_row(short_run):
    config, opts, traj = short_run
    table = table_from_trajectory(traj, store_every=17)  # 2000 % 17 != 0
    assert table.times[-1] == traj.times[-1]


def test_report_reproducible_from_csv_alone(short_run, tmp_path):
    config, opts, traj = short_run
    table = table_from_trajectory(traj, store_every=10)
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(path, table)

    original = build_report(table, config.spec, config.params, opts.threshold)
    regenerated = build_report(
        read_trajectory_csv(path), config.spec, config.params, opts.threshold
    )
    assert original == regenerated


def test_report_fields_on_converged_run():
    config, opts = load_config("example2")
    traj = integrate(config)
    table = table_from_trajectory(traj, store_every=10)
    report = build_report(table, config.spec, config.params, opts.threshold)
    assert report["n_agents"] == 6
    assert report["final_radius_error_max"] < 1e-2
    assert report["final_spacing_error_max"] < 1e-2
    assert report["equilibrium_case"] == "circling"
    assert report["settle_time_radius"] is not None
    assert report["settle_time_radius"] < 60.0
    assert report["min_pairwise_distance"] > 0.0


def test_metric_table_angle_rate_uses_differenced_target_velocity(short_run):
    # the CSV stores no target velocity; the finite-difference estimate
    # must land within the differencing error of the exact rate error
    config, opts, traj = short_run
    table = table_from_trajectory(traj, store_every=1)
    m = metrics_from_table(table, config.spec, config.params)
    exact = traj.angle_rate - config.spec.omega
    assert np.abs(m.angle_rate_error - exact).max() < 1e-6
