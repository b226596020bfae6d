import math

import pytest
from hypothesis import given, strategies as st

from ringform.geometry import (
    TWO_PI,
    Vec2,
    circular_distance,
    rotate,
    rotate_into_frame,
    to_polar,
    wrap_angle,
)

finite_angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec2(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Vec2(0.0, float("inf"))


def test_wrap_angle_examples():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi, abs=1e-15)
    assert wrap_angle(-math.pi / 2) == pytest.approx(3 * math.pi / 2, abs=1e-15)


def test_wrap_angle_rejects_non_finite():
    for bad in (float("nan"), float("inf"), -float("inf")):
        with pytest.raises(ValueError):
            wrap_angle(bad)


@given(finite_angles)
def test_wrap_angle_idempotent_and_in_range(theta):
    w = wrap_angle(theta)
    assert 0.0 <= w < TWO_PI
    assert wrap_angle(w) == w


@given(finite_angles, finite_angles)
def test_circular_distance_symmetric_and_bounded(a, b):
    d = circular_distance(a, b)
    assert 0.0 <= d <= math.pi + 1e-12
    assert d == pytest.approx(circular_distance(b, a), abs=1e-12)


def test_circular_distance_across_seam():
    assert circular_distance(0.01, TWO_PI - 0.01) == pytest.approx(0.02, abs=1e-12)


def test_to_polar_axis_aligned():
    dec = to_polar(Vec2(1.0, 0.0), Vec2(0.0, 2.0))
    assert dec == pytest.approx((1.0, 2.0, 0.0, math.pi / 2, math.pi / 2))


def test_to_polar_zero_vectors_use_zero_angle_convention():
    dec = to_polar(Vec2(0.0, 0.0), Vec2(0.0, 0.0))
    assert dec == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_to_polar_hand_computed():
    dec = to_polar(Vec2(3.0, 4.0), Vec2(-4.0, 3.0))
    assert dec.rho == pytest.approx(5.0)
    assert dec.speed == pytest.approx(5.0)
    assert dec.angle == pytest.approx(math.atan2(4.0, 3.0))
    assert dec.heading == pytest.approx(math.atan2(3.0, -4.0))
    assert dec.beta == pytest.approx(math.pi / 2)


@given(
    st.floats(min_value=1e-6, max_value=1e3),
    finite_angles,
)
def test_to_polar_round_trips_position(rho, theta):
    p = Vec2(rho * math.cos(theta), rho * math.sin(theta))
    dec = to_polar(p, Vec2(0.0, 0.0))
    rebuilt = Vec2(dec.rho * math.cos(dec.angle), dec.rho * math.sin(dec.angle))
    assert rebuilt.x == pytest.approx(p.x, abs=1e-12 * max(1.0, rho))
    assert rebuilt.y == pytest.approx(p.y, abs=1e-12 * max(1.0, rho))


def test_rotate_into_frame_examples():
    assert rotate_into_frame(Vec2(1.0, 0.0), 0.0) == Vec2(1.0, 0.0)
    out = rotate_into_frame(Vec2(0.0, 1.0), math.pi / 2)
    assert (out.x, out.y) == pytest.approx((1.0, 0.0), abs=1e-15)
    out = rotate_into_frame(Vec2(1.0, 1.0), math.pi / 4)
    assert (out.x, out.y) == pytest.approx((math.sqrt(2.0), 0.0), abs=1e-15)


moderate_angles = st.floats(min_value=-50, max_value=50, allow_nan=False)


@given(
    st.floats(min_value=-10, max_value=10),
    st.floats(min_value=-10, max_value=10),
    moderate_angles,
    moderate_angles,
)
def test_rotation_preserves_norm_and_composes(x, y, a, b):
    v = Vec2(x, y)
    assert rotate_into_frame(v, a).norm() == pytest.approx(v.norm(), abs=1e-12)
    once = rotate_into_frame(rotate_into_frame(v, a), b)
    combined = rotate_into_frame(v, wrap_angle(a + b))
    assert once.x == pytest.approx(combined.x, abs=1e-12)
    assert once.y == pytest.approx(combined.y, abs=1e-12)


def test_rotate_is_inverse_of_rotate_into_frame():
    v = Vec2(0.3, -1.7)
    back = rotate(rotate_into_frame(v, 1.1), 1.1)
    assert (back.x, back.y) == pytest.approx((v.x, v.y), abs=1e-14)
