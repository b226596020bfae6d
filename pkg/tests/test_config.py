import math

import pytest

from ringform.config import BUNDLED, load_config, parse_config
from ringform.geometry import TWO_PI
from ringform.simulate import ExplicitInit, InvalidConfig, RandomAnnulusInit


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_configs_load(name):
    config, opts = load_config(name)
    assert config.spec.n == 6
    assert math.isclose(sum(config.spec.spacings), TWO_PI, abs_tol=1e-9)
    assert opts.store_every == 10


def test_bundled_example2_values():
    config, _ = load_config("example2")
    assert config.spec.omega == 1.0
    assert config.spec.radii == (0.6, 1.5, 0.6, 1.5, 0.6, 1.5)
    assert config.params.sigma == -1.0
    assert config.target.kind == "constant-velocity"
    assert (config.target.velocity.x, config.target.velocity.y) == (0.05, 0.03)


def test_equal_shorthand_with_scalar_radius():
    config, _ = parse_config(
        """
[formation]
n = 4
d = "equal"
R = 2.0
omega = 0.5
"""
    )
    assert config.spec.spacings == (TWO_PI / 4,) * 4
    assert config.spec.radii == (2.0,) * 4
    assert isinstance(config.init, RandomAnnulusInit)


def test_explicit_gap_list():
    config, _ = parse_config(
        f"""
[formation]
d = [1.0, 2.0, {TWO_PI - 3.0!r}]
R = [1.0, 1.0, 1.0]
omega = 0.0
"""
    )
    assert config.spec.n == 3


def test_bad_gap_sum_reports_violation():
    with pytest.raises(InvalidConfig) as err:
        parse_config(
            """
[formation]
d = [3.14159, 3.14159, 3.14159]
R = [1.0, 1.0, 1.0]
"""
        )
    assert any("sum" in v for v in err.value.violations)


def test_negative_radius_reports_violation():
    with pytest.raises(InvalidConfig) as err:
        parse_config(
            """
[formation]
n = 3
d = "equal"
R = [1.0, -1.0, 1.0]
"""
        )
    assert any("R_2" in v for v in err.value.violations)


def test_explicit_init_states():
    config, _ = parse_config(
        """
[formation]
n = 2
d = "equal"
R = 1.0

[sim]
init = "explicit"
states = [[1.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0]]
"""
    )
    assert isinstance(config.init, ExplicitInit)
    assert config.init.states[0].p.x == 1.0


def test_explicit_init_wrong_count():
    with pytest.raises(InvalidConfig) as err:
        parse_config(
            """
[formation]
n = 3
d = "equal"
R = 1.0

[sim]
init = "explicit"
states = [[1.0, 0.0, 0.0, 0.0]]
"""
        )
    assert any("explicit init" in v for v in err.value.violations)


def test_invalid_toml_reports_violation():
    with pytest.raises(InvalidConfig) as err:
        parse_config("[formation\nn = 3")
    assert any("TOML" in v for v in err.value.violations)


def test_missing_file():
    with pytest.raises(InvalidConfig):
        load_config("/nonexistent/path.toml")


def test_bad_store_every():
    with pytest.raises(InvalidConfig):
        parse_config(
            """
[formation]
n = 2
d = "equal"
R = 1.0

[sim]
store_every = 0
"""
        )


def test_unknown_target_kind():
    with pytest.raises(InvalidConfig):
        parse_config(
            """
[formation]
n = 2
d = "equal"
R = 1.0

[target]
kind = "warp"
"""
        )
