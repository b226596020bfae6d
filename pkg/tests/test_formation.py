import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringform.formation import (
    FormationSpec,
    RingTopology,
    assign_labels,
    equal_spacing,
    validate,
)
from ringform.geometry import TWO_PI, Vec2


def test_neighbor_plus_examples():
    ring = RingTopology(6)
    assert ring.neighbor_plus(1) == 2
    assert ring.neighbor_plus(6) == 1
    assert RingTopology(2).neighbor_plus(2) == 1


def test_neighbor_minus_examples():
    ring = RingTopology(6)
    assert ring.neighbor_minus(1) == 6
    assert ring.neighbor_minus(3) == 2
    assert RingTopology(2).neighbor_minus(2) == 1


def test_neighbor_out_of_range():
    ring = RingTopology(4)
    for bad in (0, 5, -1):
        with pytest.raises(ValueError):
            ring.neighbor_plus(bad)
        with pytest.raises(ValueError):
            ring.neighbor_minus(bad)


@given(st.integers(min_value=2, max_value=40), st.data())
def test_neighbors_are_mutually_inverse(n, data):
    ring = RingTopology(n)
    i = data.draw(st.integers(min_value=1, max_value=n))
    assert ring.neighbor_minus(ring.neighbor_plus(i)) == i
    assert ring.neighbor_plus(ring.neighbor_minus(i)) == i


def test_validate_admissible_equal_spacing():
    spec = FormationSpec(spacings=(TWO_PI / 3,) * 3, radii=(1.0, 1.0, 1.0), omega=0.5)
    assert validate(spec) == []


def test_validate_bad_sum():
    spec = FormationSpec(spacings=(math.pi,) * 3, radii=(1.0,) * 3, omega=0.0)
    violations = validate(spec)
    assert len(violations) == 1
    assert "sum" in violations[0]


def test_validate_bad_radius():
    spec = FormationSpec(spacings=(TWO_PI / 3,) * 3, radii=(1.0, -1.0, 1.0), omega=0.0)
    violations = validate(spec)
    assert any("R_2" in v for v in violations)


def test_validate_too_few_agents():
    spec = FormationSpec(spacings=(TWO_PI,), radii=(1.0,), omega=0.0)
    assert any("at least 2" in v for v in validate(spec))


@given(
    st.integers(min_value=2, max_value=30),
    st.floats(min_value=0.01, max_value=100.0),
)
def test_equal_spacing_always_admissible(n, radius):
    assert validate(equal_spacing(n, radius, omega=0.3)) == []


def test_assign_labels_sorts_by_angle():
    positions = [
        Vec2(0.0, 1.0),   # angle pi/2
        Vec2(1.0, 0.0),   # angle 0
        Vec2(-1.0, 0.0),  # angle pi
    ]
    assert assign_labels(positions, Vec2(0.0, 0.0), rng_seed=0) == (2, 1, 3)


def test_assign_labels_same_ray_sorts_by_distance():
    positions = [Vec2(2.0, 0.0), Vec2(1.0, 0.0)]
    assert assign_labels(positions, Vec2(0.0, 0.0), rng_seed=0) == (2, 1)


def test_assign_labels_coincident_positions_deterministic():
    positions = [Vec2(1.0, 1.0), Vec2(1.0, 1.0), Vec2(-1.0, 0.5)]
    first = assign_labels(positions, Vec2(0.0, 0.0), rng_seed=123)
    for _ in range(5):
        assert assign_labels(positions, Vec2(0.0, 0.0), rng_seed=123) == first
    assert sorted(first) == [1, 2, 3]


def test_assign_labels_rejects_position_on_target():
    with pytest.raises(ValueError):
        assign_labels([Vec2(0.5, 0.5), Vec2(1.0, 2.0)], Vec2(1.0, 2.0), rng_seed=0)


@given(st.integers(min_value=1, max_value=20), st.integers(min_value=0, max_value=2**32 - 1))
def test_assign_labels_is_a_permutation(n, seed):
    rng = np.random.default_rng(seed)
    positions = [Vec2(*rng.uniform(-5, 5, 2)) for _ in range(n)]
    target = Vec2(*rng.uniform(-5, 5, 2))
    if any(p == target for p in positions):
        return
    order = assign_labels(positions, target, rng_seed=seed)
    assert sorted(order) == list(range(1, n + 1))
